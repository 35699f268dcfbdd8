#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rttforge::cli {

inline constexpr const char* kSchema = "rtt-forge/1";

enum class ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

struct RunConfig {
  // karn-run | rto-run | rto-bounds | scenario | gbn | tbf-compose-check |
  // tbf-trace | gen-exec | selftest
  std::string command;
  std::string mode;  // gbn: best-case | overtx; scenario: spike | uniform
  std::string input;
  std::string output;
  std::string report;
  std::string trace;
  std::string config;  // JSON parameter file
  // Parameters as given on the command line, keyed by flag name. Values
  // from the JSON config fill in whatever is missing.
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  bool decimal = false;
  bool allow_sample_at_high_zero = false;
};

// Runs a parsed configuration. Data goes to `out` unless an output path is
// set; failure reports go to `err` as JSON.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv and dispatches. Usage errors return 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rttforge::cli
