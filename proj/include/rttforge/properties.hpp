#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rttforge/rng.hpp"
#include "rttforge/tbf.hpp"

namespace rttforge {

struct SuiteResult {
  SuiteResult() = default;
  explicit SuiteResult(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::vector<std::string> failures;  // first few, for the report
  // Suite-specific counters, e.g. how many scripts contained an age-out.
  std::vector<std::pair<std::string, std::uint64_t>> counters;
  double seconds = 0;

  bool ok() const { return violations == 0 && trials > 0; }
  void fail(const std::string& what);
  std::uint64_t counter(const std::string& key) const;
  void bump(const std::string& key, std::uint64_t by = 1);
};

// Randomized suites. Every one is deterministic in (seed, trials).
SuiteResult numerics_suite(std::uint64_t seed, std::size_t trials);
SuiteResult rto_algebra_suite(std::uint64_t seed, std::size_t trials);
SuiteResult steady_bound_suite(std::uint64_t seed, std::size_t trials);
SuiteResult limit_delta_suite(std::uint64_t seed, std::size_t trials);
SuiteResult karn_mixed_suite(std::uint64_t seed, std::size_t trials);
SuiteResult karn_fifo_suite(std::uint64_t seed, std::size_t trials);
SuiteResult gbn_endpoint_suite(std::uint64_t seed, std::size_t trials);
SuiteResult token_bound_suite(std::uint64_t seed, std::size_t trials);
SuiteResult tbf_state_suite(std::uint64_t seed, std::size_t trials);
SuiteResult composition_suite(std::uint64_t seed, std::size_t trials);

// Fixed scenarios.
// Spike scenario with its standard parameters: timeouts from the frozen
// warm-up on must sit exactly on the spikes.
SuiteResult spike_suite(std::size_t frozen_warmup);
SuiteResult best_case_suite();
SuiteResult overtx_suite();
SuiteResult warmup_suite();

// Runs everything; trials == 0 keeps each suite's default count.
std::vector<SuiteResult> run_all_suites(std::uint64_t seed, std::size_t trials);

// Generators shared with the tests.
struct TbfTrial {
  TbfState start;
  std::vector<TbfOp> ops;
};
// Starts with a tick; every op is valid where it is applied.
TbfTrial gen_tbf_trial(Rng& rng, std::size_t max_ops);

struct SerialTrial {
  TbfState first, second;
  std::vector<SerialOp> script;
  bool has_age_out = false;
  bool has_decay = false;
};
// When both delays are finite, every second-stage tick comes right after a
// first-stage tick so the two clocks never drift apart.
SerialTrial gen_serial_trial(Rng& rng, std::size_t max_steps);

}  // namespace rttforge
