#include "rttforge/karn.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "rttforge/csv.hpp"

namespace rttforge {

namespace {

std::uint64_t lookup(const std::map<std::uint64_t, std::uint64_t>& m,
                     std::uint64_t k) {
  const auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}

struct SampleContext {
  std::size_t event_index;
  std::uint64_t old_high;
  std::uint64_t new_high;
  std::uint64_t value;
};

// Replays the monitor and records the high values around each sample.
std::vector<SampleContext> sample_contexts(const Execution& e) {
  std::vector<SampleContext> out;
  KarnState s = karn_init();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e[i].is_sender_event()) continue;
    const std::uint64_t before = s.high;
    if (auto v = karn_apply(s, e[i], i)) {
      out.push_back({i, before, s.high, *v});
    }
  }
  return out;
}

std::string describe(const SampleContext& c) {
  return "sample " + std::to_string(c.value) + " at event " +
         std::to_string(c.event_index);
}

}  // namespace

std::uint64_t KarnState::num_t(std::uint64_t id) const {
  return lookup(numT, id);
}
std::uint64_t KarnState::time_of(std::uint64_t id) const {
  return lookup(time, id);
}

KarnState karn_init() { return KarnState{}; }

bool ok_to_sample(const KarnState& s, std::uint64_t j) {
  if (s.high > 0 && s.num_t(s.high) != 1) return false;
  if (j <= s.high + 1) return true;
  // Every id strictly between high and j must be present with count 1.
  std::uint64_t seen = 0;
  for (auto it = s.numT.upper_bound(s.high); it != s.numT.end() && it->first < j;
       ++it) {
    if (it->second != 1) return false;
    ++seen;
  }
  return seen == j - s.high - 1;
}

std::optional<std::uint64_t> karn_apply(KarnState& s, const Action& a,
                                        std::size_t event_index,
                                        const KarnOptions& opts) {
  if (!a.is_sender_event()) {
    throw std::invalid_argument("karn: not a sender event: " + to_string(a));
  }
  std::optional<std::uint64_t> sample;
  if (a.kind == ActionKind::SndS) {
    ++s.numT[a.id];
    if (s.time_of(a.id) == 0) s.time[a.id] = s.tau;
  } else if (a.id > s.high) {
    if (ok_to_sample(s, a.id) && (s.high > 0 || opts.allow_sample_at_high_zero)) {
      sample = s.tau - s.time_of(s.high);
      s.emitted.push_back({event_index, *sample});
    }
    s.high = a.id;
  }
  ++s.tau;
  return sample;
}

std::pair<KarnState, std::optional<std::uint64_t>> karn_step(
    const KarnState& s, const Action& a, std::size_t event_index,
    const KarnOptions& opts) {
  KarnState next = s;
  auto sample = karn_apply(next, a, event_index, opts);
  return {std::move(next), sample};
}

std::optional<std::string> karn_invariant_violation(const KarnState& s) {
  std::uint64_t expected = 1;
  std::uint64_t last_time = 0;
  for (const auto& [id, count] : s.numT) {
    if (count == 0) continue;
    if (id != expected) {
      return "transmitted ids are not a prefix: missing " +
             std::to_string(expected);
    }
    const std::uint64_t t = s.time_of(id);
    if (t <= last_time) {
      return "first-send times not increasing at id " + std::to_string(id);
    }
    last_time = t;
    ++expected;
  }
  return std::nullopt;
}

KarnRun karn_run(const Execution& e, const KarnOptions& opts) {
  require_valid(e);
  KarnRun run{karn_init(), {}};
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i].is_sender_event()) karn_apply(run.final_state, e[i], i, opts);
  }
  run.samples = run.final_state.emitted;
  return run;
}

ObsReport check_sample_upper_bound(const Execution& e) {
  require_valid(e);
  ObsReport report;
  for (const SampleContext& c : sample_contexts(e)) {
    ++report.samples_checked;
    std::uint64_t witness = 0;
    for (std::uint64_t l = std::max<std::uint64_t>(c.old_high, 1);
         l < c.new_high; ++l) {
      const auto r = rtt(e, l);
      if (!r) continue;
      if (*r > c.value) {
        report.ok = false;
        report.violations.push_back(describe(c) + ": rtt(" + std::to_string(l) +
                                    ") = " + std::to_string(*r) + " exceeds it");
      }
      if (*r == c.value && witness == 0) witness = l;
    }
    if (witness == 0) {
      report.ok = false;
      report.violations.push_back(describe(c) + ": no id attains it");
    }
    report.witnesses.push_back(witness);
  }
  return report;
}

ObsReport check_sample_exact(const Execution& e) {
  if (!is_fifo_ack(e)) {
    throw std::invalid_argument("check_sample_exact: execution is not FIFO-ack");
  }
  ObsReport report;
  for (const SampleContext& c : sample_contexts(e)) {
    ++report.samples_checked;
    const auto r = rtt(e, c.old_high);
    report.witnesses.push_back(r && *r == c.value ? c.old_high : 0);
    if (!r || *r != c.value) {
      report.ok = false;
      report.violations.push_back(
          describe(c) + ": rtt(" + std::to_string(c.old_high) + ") = " +
          (r ? std::to_string(*r) : std::string("undefined")));
    }
  }
  return report;
}

void write_samples_csv(std::ostream& out, const std::vector<KarnSample>& s) {
  csv::write_row(out, {"event_index", "sample"});
  for (const KarnSample& k : s) {
    csv::write_row(out, {std::to_string(k.event_index), std::to_string(k.value)});
  }
}

std::vector<KarnSample> read_samples_csv(std::istream& in) {
  std::vector<KarnSample> out;
  for (const auto& row : csv::read_with_header(in, {"event_index", "sample"})) {
    out.push_back({static_cast<std::size_t>(std::stoull(row[0])),
                   std::stoull(row[1])});
  }
  return out;
}

}  // namespace rttforge
