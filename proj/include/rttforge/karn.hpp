#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rttforge/execution.hpp"

namespace rttforge {

struct KarnSample {
  std::size_t event_index;
  std::uint64_t value;
  friend bool operator==(const KarnSample&, const KarnSample&) = default;
};

// Monitor state. numT and time only hold ids that have been transmitted;
// any other id reads as 0.
struct KarnState {
  std::uint64_t tau = 1;
  std::map<std::uint64_t, std::uint64_t> numT;
  std::map<std::uint64_t, std::uint64_t> time;
  std::uint64_t high = 0;
  std::vector<KarnSample> emitted;

  std::uint64_t num_t(std::uint64_t id) const;
  std::uint64_t time_of(std::uint64_t id) const;

  friend bool operator==(const KarnState&, const KarnState&) = default;
};

struct KarnOptions {
  // Emit a sample on the first ACK delivery as well (reads time[0] = 0).
  bool allow_sample_at_high_zero = false;
};

KarnState karn_init();

bool ok_to_sample(const KarnState& s, std::uint64_t j);

// In-place step. Throws std::invalid_argument for receiver/channel-side
// actions. event_index is recorded with any emitted sample.
std::optional<std::uint64_t> karn_apply(KarnState& s, const Action& a,
                                        std::size_t event_index,
                                        const KarnOptions& opts = {});

std::pair<KarnState, std::optional<std::uint64_t>> karn_step(
    const KarnState& s, const Action& a, std::size_t event_index,
    const KarnOptions& opts = {});

// Returns a description of the first broken bookkeeping invariant: the
// transmitted ids form a prefix 1..m and first-send times strictly increase
// along it.
std::optional<std::string> karn_invariant_violation(const KarnState& s);

struct KarnRun {
  KarnState final_state;
  std::vector<KarnSample> samples;  // indices into the full execution
};

// Folds the monitor over the sender events of a valid execution.
KarnRun karn_run(const Execution& e, const KarnOptions& opts = {});

struct ObsReport {
  bool ok = true;
  std::size_t samples_checked = 0;
  std::vector<std::string> violations;
  // Per sample, the id whose rtt equals it (0 when none was found).
  std::vector<std::uint64_t> witnesses;
};

// Every fresh sample bounds from above the defined rtt of each id in
// [old high, new high) and is attained by one of them.
ObsReport check_sample_upper_bound(const Execution& e);

// On FIFO-ack executions each sample equals the rtt of the previous high.
// Throws std::invalid_argument when e is not FIFO-ack.
ObsReport check_sample_exact(const Execution& e);

void write_samples_csv(std::ostream& out, const std::vector<KarnSample>& s);
std::vector<KarnSample> read_samples_csv(std::istream& in);

}  // namespace rttforge
