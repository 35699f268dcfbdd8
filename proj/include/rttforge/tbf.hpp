#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rttforge/gbn_endpoints.hpp"
#include "rttforge/numerics.hpp"

namespace rttforge {

struct TbfParams {
  std::uint64_t b_cap = 1;
  std::uint64_t d_cap = 1;
  std::uint64_t rat = 1;
  ExtNat ttl = ExtNat::infinity();
  void validate() const;  // all positive, rat <= b_cap
  friend bool operator==(const TbfParams&, const TbfParams&) = default;
};

struct TimedDatagram {
  ExtNat remaining;
  Datagram dg;
  friend bool operator==(const TimedDatagram&, const TimedDatagram&) = default;
};

// data[0] is the most recently queued datagram; FIFO forwarding takes the
// last element.
struct TbfState {
  TbfParams params;
  std::uint64_t bucket = 0;
  std::vector<TimedDatagram> data;

  static TbfState empty(const TbfParams& params, std::uint64_t bucket = 0);
  std::uint64_t sz() const;
  std::vector<std::uint64_t> ids() const;
  // Index of the entry carrying id, if any.
  std::optional<std::size_t> find(std::uint64_t id) const;
  friend bool operator==(const TbfState&, const TbfState&) = default;
};

std::optional<std::string> tbf_invariant_violation(const TbfState& t);

TbfState tick(const TbfState& t);
// Same as tick, also reporting the ids that aged out.
TbfState tick(const TbfState& t, std::vector<std::uint64_t>& expired);
TbfState decay(const TbfState& t);
// Enqueues at the head when it fits; otherwise returns t unchanged.
TbfState process(const TbfState& t, const Datagram& dg);
bool fits(const TbfState& t, const Datagram& dg);
TbfState drop(const TbfState& t, std::size_t i);  // throws std::out_of_range
std::pair<TbfState, Datagram> forward(const TbfState& t, std::size_t i);

enum class TbfOpKind { Tick, Decay, Process, Drop, Forward };
std::string to_string(TbfOpKind k);

struct TbfOp {
  TbfOpKind kind = TbfOpKind::Tick;
  std::size_t index = 0;  // drop / forward
  Datagram dg;            // process
};

TbfState apply(const TbfState& t, const TbfOp& op);

// Replays ops from start. For every stretch opened by a tick, the bytes
// forwarded before the next tick are at most the bucket right after that
// opening tick. The stretch before the first tick is measured against the
// starting bucket.
bool token_bound_check(const TbfState& start, const std::vector<TbfOp>& ops);

TbfState abstract_compose(const TbfState& t1, const TbfState& t2);

// Same parameters and the same multiset of ids.
bool tbf_equiv(const TbfState& a, const TbfState& b);

// Steps of the chained pair F1 then F2. A hop forwards F1[index] and
// immediately offers it to F2.
enum class SerialOpKind {
  Process1, Tick1, Decay1, Drop1, Hop, Tick2, Decay2, Drop2, Forward2
};
std::string to_string(SerialOpKind k);

struct SerialOp {
  SerialOpKind kind = SerialOpKind::Tick1;
  std::size_t index = 0;
  Datagram dg;
};

struct SerialReport {
  bool equivalent = true;
  std::size_t steps = 0;
  TbfState first, second, abstract;
  // Set when the abstract side cannot follow; names the reason.
  std::optional<std::string> failure;
  std::size_t failure_index = 0;
  // Abstract operations used to mirror the script, one line per action.
  std::vector<std::string> mirror_log;
};

// Replays the script on the chained pair while driving a single abstract
// TBF built by abstract_compose, and checks equivalence after every step.
// Invalid steps (bad index, missing tokens, id reuse) throw ScriptError.
SerialReport simulate_serial(const TbfState& t1, const TbfState& t2,
                             const std::vector<SerialOp>& script);

// Trace CSV: step, op, arg, bucket, sz_data, ids (';'-joined, list order).
struct TbfTraceRow {
  std::size_t step;
  std::string op;
  std::string arg;
  std::uint64_t bucket;
  std::uint64_t sz_data;
  std::vector<std::uint64_t> ids;
  friend bool operator==(const TbfTraceRow&, const TbfTraceRow&) = default;
};
std::vector<TbfTraceRow> tbf_trace(const TbfState& start,
                                   const std::vector<TbfOp>& ops);
void write_tbf_trace_csv(std::ostream& out, const std::vector<TbfTraceRow>& rows);
std::vector<TbfTraceRow> read_tbf_trace_csv(std::istream& in);

}  // namespace rttforge
