#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rttforge/execution.hpp"
#include "rttforge/gbn_endpoints.hpp"
#include "rttforge/numerics.hpp"
#include "rttforge/tbf.hpp"

namespace rttforge {

// tbf_s carries data from sender to receiver, tbf_r carries ACKs back.
struct SystemState {
  SenderState sender;
  ReceiverState receiver;
  TbfState tbf_s;
  TbfState tbf_r;

  std::string canonical() const;
  std::uint64_t digest() const;  // FNV-1a over canonical()
  friend bool operator==(const SystemState&, const SystemState&) = default;
};

std::optional<std::string> system_invariant_violation(const SystemState& s);

enum class StepKind {
  SenderSnd,
  ReceiverSnd,
  SenderTimeout,
  TbfSRInternal,  // internal step of tbf_s
  TbfRSInternal,  // internal step of tbf_r
  SenderRcv,      // tbf_r forwards an ACK to the sender
  ReceiverRcv,    // tbf_s forwards a packet to the receiver
};

enum class InternalOp { Tick, Decay, Drop };

struct Step {
  StepKind kind = StepKind::SenderSnd;
  std::string payload;                // SenderSnd
  InternalOp op = InternalOp::Tick;   // internal steps
  std::size_t index = 0;              // drop and the two receive steps

  static Step sender_snd(std::string payload) {
    return {StepKind::SenderSnd, std::move(payload)};
  }
  static Step receiver_snd() { return of(StepKind::ReceiverSnd); }
  static Step sender_timeout() { return of(StepKind::SenderTimeout); }
  static Step tbf_s(InternalOp op, std::size_t index = 0) {
    return {StepKind::TbfSRInternal, {}, op, index};
  }
  static Step tbf_r(InternalOp op, std::size_t index = 0) {
    return {StepKind::TbfRSInternal, {}, op, index};
  }
  static Step sender_rcv(std::size_t index) {
    return {StepKind::SenderRcv, {}, InternalOp::Tick, index};
  }
  static Step receiver_rcv(std::size_t index) {
    return {StepKind::ReceiverRcv, {}, InternalOp::Tick, index};
  }

  static Step of(StepKind kind) {
    Step s;
    s.kind = kind;
    return s;
  }

  friend bool operator==(const Step&, const Step&) = default;
};

// Compact text form, e.g. "sender_snd:p", "tbf_s:tick", "tbf_r:drop:2",
// "receiver_rcv:0". parse_step is its inverse.
std::string to_string(const Step& s);
Step parse_step(const std::string& text);

// Observable event of a step. Internal steps and timeouts emit none.
struct SysEvent {
  ActionKind kind;
  Datagram dg;
  friend bool operator==(const SysEvent&, const SysEvent&) = default;
};

// Throws PreconditionError naming the component and rule.
std::pair<SystemState, std::optional<SysEvent>> sys_step(const SystemState& s,
                                                         const Step& step);

struct TraceEntry {
  std::uint64_t pre_digest;
  Step step;
  std::optional<SysEvent> event;
  std::uint64_t post_digest;
};

struct Trace {
  std::vector<TraceEntry> entries;
  std::uint64_t packets_received_by_receiver = 0;
  // Deliveries in either direction (to the receiver and to the sender).
  std::uint64_t dlv_events = 0;
  SystemState initial;
  SystemState final_state;
};

// Throws ScriptError with the index of the first step that does not apply.
Trace replay(const SystemState& s0, const std::vector<Step>& script);

// Observable events of a trace as an execution over ids.
Execution to_execution(const Trace& t);

// Packets delivered in order over packets received. Needs a receive.
Rational efficiency(const Trace& t);

struct Scenario {
  SystemState initial;
  std::vector<Step> script;
};

// One packet per round trip, w windows of N packets each.
Scenario build_best_case(std::uint64_t N, std::uint64_t windows = 1);

std::uint64_t steps_to_fill(std::uint64_t R, std::uint64_t b,
                            std::uint64_t d_cap);

Rational predicted_overtx_eff(const Rational& R, const Rational& rat,
                              const Rational& d_cap, const Rational& N);

struct OvertxScenario {
  SystemState initial;
  std::vector<Step> script;
  std::uint64_t warmup = 0;
  // Script length after each of the first `warmup` bursts.
  std::vector<std::size_t> burst_ends;
};

// Sender bursts R one-byte packets per tick into a queue that refills rat
// tokens per tick; the receiver acknowledges after N receives.
OvertxScenario build_overtx(std::uint64_t N, std::uint64_t R, std::uint64_t rat,
                            std::uint64_t d_cap);

// Reduced view: ids queued toward the receiver, the queue capacity, the
// receiver's next ACK and the sender window.
struct SimplifiedState {
  std::vector<std::uint64_t> chan;
  std::uint64_t d_cap = 0;
  std::uint64_t ack = 1;
  std::uint64_t cur = 1;
  std::uint64_t hiA = 1;
  std::uint64_t N = 1;
  friend bool operator==(const SimplifiedState&, const SimplifiedState&) = default;
};

SimplifiedState simplify(const SystemState& s);
// R sends (queued at the head while room remains), then b FIFO deliveries.
SimplifiedState single_step_simplified(const SimplifiedState& s, std::uint64_t R,
                                       std::uint64_t b);
SimplifiedState many_steps_simplified(SimplifiedState s, std::uint64_t R,
                                      std::uint64_t b, std::uint64_t steps);
// [top, top-1, ..., top-len+1]
std::vector<std::uint64_t> top_down(std::uint64_t top, std::uint64_t len);

// Trace CSV: step, op, event, id, hiA, cur, rcv_ack, sz_s, sz_r, digest.
// event and id are empty for silent steps; digest is hex.
struct SystemTraceRow {
  std::size_t step = 0;
  Step op;
  std::optional<ActionKind> event;
  std::optional<std::uint64_t> id;
  std::uint64_t hiA = 0, cur = 0, rcv_ack = 0, sz_s = 0, sz_r = 0;
  std::uint64_t digest = 0;
  friend bool operator==(const SystemTraceRow&, const SystemTraceRow&) = default;
};
std::vector<SystemTraceRow> system_trace_rows(const Trace& t);
void write_system_trace_csv(std::ostream& out, const Trace& t);
std::vector<SystemTraceRow> read_system_trace_csv(std::istream& in);

}  // namespace rttforge
