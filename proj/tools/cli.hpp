#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reveal::cli {

// Exit codes: 0 success, 1 audit failure or runtime error, 2 usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

// Splices `key: value` lines from --config files into the argument list as
// flags, skipping keys given explicitly (explicit flags win).
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace reveal::cli
