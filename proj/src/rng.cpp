#include "reveal/rng.hpp"

namespace reveal {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_seed(const StreamKey& key, std::string_view tag) noexcept {
  std::uint64_t h = splitmix64(key.master);
  h = splitmix64(h ^ key.instance);
  h = splitmix64(h ^ key.replication);
  return splitmix64(h ^ stream_tag(tag));
}

Rng make_stream(const StreamKey& key, std::string_view tag) {
  return Rng(derive_seed(key, tag));
}

double uniform01(Rng& rng) {
  // 53 random mantissa bits -> [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace reveal
