#pragma once

#include "reveal/types.hpp"

#include <cstdint>
#include <string_view>

namespace reveal {

// Identifies one trajectory. Streams are derived from the key plus a tag, so
// the stream a consumer sees never depends on scheduling or on which other
// streams exist.
struct StreamKey {
  std::uint64_t master = 0;
  std::uint64_t instance = 0;
  std::uint64_t replication = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a over the tag bytes.
std::uint64_t stream_tag(std::string_view tag) noexcept;

std::uint64_t derive_seed(const StreamKey& key, std::string_view tag) noexcept;

Rng make_stream(const StreamKey& key, std::string_view tag);

double uniform01(Rng& rng);
double standard_normal(Rng& rng);

}  // namespace reveal
