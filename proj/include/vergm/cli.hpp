#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vergm::cli {

inline constexpr const char* kVersion = "0.1.0";
/// Bumped whenever a cache, posterior or manifest layout changes.
inline constexpr int kDataFormat = 1;

/// Runs one subcommand. Returns 0 on success, 2 for usage errors (unknown
/// flag, missing input, bad configuration) and 1 when the computation fails.
int dispatch(int argc, char** argv);
/// Same, with argv[0] omitted and the streams made explicit (used by tests).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vergm::cli
