#include "rttforge/system.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rttforge/csv.hpp"
#include "rttforge/errors.hpp"

namespace rttforge {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void put_tbf(std::ostringstream& os, const TbfState& t) {
  os << t.params.b_cap << ',' << t.params.d_cap << ',' << t.params.rat << ','
     << t.params.ttl << ';' << t.bucket << ';';
  for (const auto& td : t.data) {
    os << '[' << td.remaining << ':' << td.dg.id << ':' << td.dg.payload.size()
       << ':' << td.dg.payload << ']';
  }
}

std::string op_name(InternalOp op) {
  switch (op) {
    case InternalOp::Tick: return "tick";
    case InternalOp::Decay: return "decay";
    case InternalOp::Drop: return "drop";
  }
  return "?";
}

TbfState internal_step(const TbfState& t, InternalOp op, std::size_t index,
                       const char* component) {
  switch (op) {
    case InternalOp::Tick: return tick(t);
    case InternalOp::Decay: return decay(t);
    case InternalOp::Drop:
      if (index >= t.data.size()) {
        throw PreconditionError(component, "drop-index",
                                "index " + std::to_string(index));
      }
      return drop(t, index);
  }
  return t;
}

std::pair<TbfState, Datagram> checked_forward(const TbfState& t,
                                              std::size_t index,
                                              const char* component) {
  if (index >= t.data.size()) {
    throw PreconditionError(component, "forward-index",
                            "index " + std::to_string(index) + ", queue " +
                                std::to_string(t.data.size()));
  }
  if (t.data[index].dg.size() > t.bucket) {
    throw PreconditionError(component, "insufficient-tokens");
  }
  return forward(t, index);
}

void require(bool cond, const std::string& rule) {
  if (!cond) throw PreconditionError("scenario", rule);
}

}  // namespace

std::string SystemState::canonical() const {
  std::ostringstream os;
  os << "S:" << sender.N << ',' << sender.hiA << ',';
  if (sender.hiP) {
    os << *sender.hiP;
  } else {
    os << '-';
  }
  os << ',' << sender.cur << "|R:" << (receiver.buffer_ooo() ? 1 : 0) << ';';
  for (std::uint64_t id : receiver.to_set()) os << id << ' ';
  os << "|TS:";
  put_tbf(os, tbf_s);
  os << "|TR:";
  put_tbf(os, tbf_r);
  return os.str();
}

std::uint64_t SystemState::digest() const { return fnv1a(canonical()); }

std::optional<std::string> system_invariant_violation(const SystemState& s) {
  if (auto v = sender_invariant_violation(s.sender)) return "sender: " + *v;
  if (auto v = tbf_invariant_violation(s.tbf_s)) return "tbf_s: " + *v;
  if (auto v = tbf_invariant_violation(s.tbf_r)) return "tbf_r: " + *v;
  return std::nullopt;
}

std::string to_string(const Step& s) {
  switch (s.kind) {
    case StepKind::SenderSnd: return "sender_snd:" + s.payload;
    case StepKind::ReceiverSnd: return "receiver_snd";
    case StepKind::SenderTimeout: return "sender_timeout";
    case StepKind::TbfSRInternal:
    case StepKind::TbfRSInternal: {
      std::string out = s.kind == StepKind::TbfSRInternal ? "tbf_s:" : "tbf_r:";
      out += op_name(s.op);
      if (s.op == InternalOp::Drop) out += ":" + std::to_string(s.index);
      return out;
    }
    case StepKind::SenderRcv: return "sender_rcv:" + std::to_string(s.index);
    case StepKind::ReceiverRcv: return "receiver_rcv:" + std::to_string(s.index);
  }
  return "?";
}

Step parse_step(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  auto index_of = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("bad step index in '" + text + "'");
    }
    return static_cast<std::size_t>(std::stoull(s));
  };
  if (head == "sender_snd") return Step::sender_snd(rest);
  if (head == "receiver_snd" && rest.empty()) return Step::receiver_snd();
  if (head == "sender_timeout" && rest.empty()) return Step::sender_timeout();
  if (head == "sender_rcv") return Step::sender_rcv(index_of(rest));
  if (head == "receiver_rcv") return Step::receiver_rcv(index_of(rest));
  if (head == "tbf_s" || head == "tbf_r") {
    const auto c2 = rest.find(':');
    const std::string op = rest.substr(0, c2);
    InternalOp kind;
    std::size_t index = 0;
    if (op == "tick" && c2 == std::string::npos) {
      kind = InternalOp::Tick;
    } else if (op == "decay" && c2 == std::string::npos) {
      kind = InternalOp::Decay;
    } else if (op == "drop" && c2 != std::string::npos) {
      kind = InternalOp::Drop;
      index = index_of(rest.substr(c2 + 1));
    } else {
      throw std::invalid_argument("bad internal step '" + text + "'");
    }
    return head == "tbf_s" ? Step::tbf_s(kind, index) : Step::tbf_r(kind, index);
  }
  throw std::invalid_argument("unknown step '" + text + "'");
}

std::pair<SystemState, std::optional<SysEvent>> sys_step(const SystemState& s,
                                                         const Step& step) {
  SystemState next = s;
  std::optional<SysEvent> event;
  switch (step.kind) {
    case StepKind::SenderSnd: {
      auto [sender, dg] = adv_cur(s.sender, step.payload);
      next.sender = std::move(sender);
      next.tbf_s = process(s.tbf_s, dg);
      event = SysEvent{ActionKind::SndS, std::move(dg)};
      break;
    }
    case StepKind::ReceiverSnd: {
      Datagram ack = snd_ack(s.receiver);
      next.tbf_r = process(s.tbf_r, ack);
      event = SysEvent{ActionKind::SndR, std::move(ack)};
      break;
    }
    case StepKind::SenderTimeout:
      next.sender = timeout(s.sender);
      break;
    case StepKind::TbfSRInternal:
      next.tbf_s = internal_step(s.tbf_s, step.op, step.index, "tbf_s");
      break;
    case StepKind::TbfRSInternal:
      next.tbf_r = internal_step(s.tbf_r, step.op, step.index, "tbf_r");
      break;
    case StepKind::SenderRcv: {
      auto [tbf, dg] = checked_forward(s.tbf_r, step.index, "tbf_r");
      next.tbf_r = std::move(tbf);
      next.sender = rcv_ack(s.sender, dg.id);
      event = SysEvent{ActionKind::DlvrR, std::move(dg)};
      break;
    }
    case StepKind::ReceiverRcv: {
      auto [tbf, dg] = checked_forward(s.tbf_s, step.index, "tbf_s");
      next.tbf_s = std::move(tbf);
      next.receiver = rcv_pkt(s.receiver, dg.id);
      event = SysEvent{ActionKind::DlvR, std::move(dg)};
      break;
    }
  }
  return {std::move(next), std::move(event)};
}

Trace replay(const SystemState& s0, const std::vector<Step>& script) {
  Trace t;
  t.initial = s0;
  SystemState cur = s0;
  std::uint64_t digest = cur.digest();
  t.entries.reserve(script.size());
  for (std::size_t k = 0; k < script.size(); ++k) {
    std::pair<SystemState, std::optional<SysEvent>> r;
    try {
      r = sys_step(cur, script[k]);
    } catch (const PreconditionError& e) {
      throw ScriptError(k, to_string(script[k]) + ": " + e.what());
    }
    cur = std::move(r.first);
    const std::uint64_t post = cur.digest();
    if (script[k].kind == StepKind::ReceiverRcv) {
      ++t.packets_received_by_receiver;
    }
    if (r.second && (r.second->kind == ActionKind::DlvR ||
                     r.second->kind == ActionKind::DlvrR)) {
      ++t.dlv_events;
    }
    t.entries.push_back({digest, script[k], std::move(r.second), post});
    digest = post;
  }
  t.final_state = std::move(cur);
  return t;
}

Execution to_execution(const Trace& t) {
  Execution e;
  for (const auto& entry : t.entries) {
    if (entry.event) e.push_back({entry.event->kind, entry.event->dg.id});
  }
  return e;
}

Rational efficiency(const Trace& t) {
  if (t.packets_received_by_receiver == 0) {
    throw std::invalid_argument("efficiency: no packets were received");
  }
  const std::uint64_t delivered = t.final_state.receiver.cum_ack() - 1;
  return Rational(BigInt(std::to_string(delivered)),
                  BigInt(std::to_string(t.packets_received_by_receiver)));
}

Scenario build_best_case(std::uint64_t N, std::uint64_t windows) {
  require(N >= 1, "window-positive");
  Scenario sc;
  sc.initial = SystemState{SenderState::initial(N), ReceiverState(),
                           TbfState::empty({1, 1, 1, ExtNat::finite(2)}),
                           TbfState::empty({3, 3, 3, ExtNat::finite(2)})};
  for (std::uint64_t w = 0; w < windows; ++w) {
    for (std::uint64_t i = 0; i < N; ++i) {
      sc.script.push_back(Step::sender_snd("p"));
      sc.script.push_back(Step::tbf_s(InternalOp::Tick));
      sc.script.push_back(Step::receiver_rcv(0));
    }
    sc.script.push_back(Step::receiver_snd());
    sc.script.push_back(Step::tbf_r(InternalOp::Tick));
    sc.script.push_back(Step::sender_rcv(0));
  }
  return sc;
}

std::uint64_t steps_to_fill(std::uint64_t R, std::uint64_t b,
                            std::uint64_t d_cap) {
  require(b < R, "rate-not-above-refill");
  require(R < d_cap, "rate-not-below-capacity");
  require((d_cap - R) % (R - b) == 0, "fill-not-divisible");
  return (d_cap - R) / (R - b);
}

Rational predicted_overtx_eff(const Rational& R, const Rational& rat,
                              const Rational& d_cap, const Rational& N) {
  require(rat < R && R < d_cap && d_cap < N, "ordering rat < R < d_cap < N");
  return (R * (d_cap - R) / (R - rat) + R + rat) / N;
}

OvertxScenario build_overtx(std::uint64_t N, std::uint64_t R, std::uint64_t rat,
                            std::uint64_t d_cap) {
  require(rat >= 1, "refill-positive");
  require(rat < R, "rate-not-above-refill");
  require(R < d_cap, "rate-not-below-capacity");
  require(d_cap < N, "capacity-not-below-window");
  require((d_cap - R) % (R - rat) == 0, "fill-not-divisible");
  const std::uint64_t w = (d_cap - R) / (R - rat);
  require(w * R + R + rat < N, "no-over-transmission");

  OvertxScenario sc;
  sc.warmup = w;
  sc.initial = SystemState{
      SenderState::initial(N), ReceiverState(),
      TbfState::empty({rat, d_cap, rat, ExtNat::infinity()}),
      TbfState::empty({3, 3, 3, ExtNat::infinity()})};

  SystemState sys = sc.initial;
  auto apply = [&](const Step& st) {
    sys = sys_step(sys, st).first;
    sc.script.push_back(st);
  };
  std::uint64_t receives = 0;
  bool ack_due = false;
  // Forward FIFO while tokens last; stop once the receiver owes an ACK.
  auto deliver = [&] {
    while (!ack_due && sys.tbf_s.bucket >= 1 && !sys.tbf_s.data.empty()) {
      apply(Step::receiver_rcv(sys.tbf_s.data.size() - 1));
      ack_due = ++receives == N;
    }
  };

  // Each cycle sends at least one packet and delivers at least one, so N
  // receives are reached well within this many cycles.
  const std::uint64_t max_cycles = 2 * N + 2;
  for (std::uint64_t cycle = 0; !ack_due; ++cycle) {
    if (cycle >= max_cycles) throw std::logic_error("build_overtx: no ACK");
    while (!ack_due && sys.sender.cur < sys.sender.hiA + N) {
      const std::uint64_t k =
          std::min(R, sys.sender.hiA + N - sys.sender.cur);
      for (std::uint64_t i = 0; i < k; ++i) apply(Step::sender_snd("p"));
      apply(Step::tbf_s(InternalOp::Tick));
      deliver();
      if (cycle == 0 && sc.burst_ends.size() < w) {
        sc.burst_ends.push_back(sc.script.size());
      }
    }
    while (!ack_due && !sys.tbf_s.data.empty()) {
      apply(Step::tbf_s(InternalOp::Tick));
      deliver();
    }
    if (!ack_due) apply(Step::sender_timeout());
  }
  apply(Step::receiver_snd());
  apply(Step::tbf_r(InternalOp::Tick));
  apply(Step::sender_rcv(0));
  return sc;
}

SimplifiedState simplify(const SystemState& s) {
  return {s.tbf_s.ids(),    s.tbf_s.params.d_cap, s.receiver.cum_ack(),
          s.sender.cur,     s.sender.hiA,         s.sender.N};
}

SimplifiedState single_step_simplified(const SimplifiedState& s, std::uint64_t R,
                                       std::uint64_t b) {
  SimplifiedState out = s;
  const std::uint64_t room = s.hiA + s.N - s.cur;
  const std::uint64_t sends = std::min(R, room);
  for (std::uint64_t i = 0; i < sends; ++i) {
    if (out.chan.size() + 1 <= out.d_cap) {
      out.chan.insert(out.chan.begin(), out.cur);
    }
    ++out.cur;
  }
  for (std::uint64_t i = 0; i < b && !out.chan.empty(); ++i) {
    const std::uint64_t id = out.chan.back();
    out.chan.pop_back();
    if (id == out.ack) ++out.ack;
  }
  return out;
}

SimplifiedState many_steps_simplified(SimplifiedState s, std::uint64_t R,
                                      std::uint64_t b, std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) s = single_step_simplified(s, R, b);
  return s;
}

std::vector<std::uint64_t> top_down(std::uint64_t top, std::uint64_t len) {
  if (len > top) throw std::invalid_argument("top_down: run below 1");
  std::vector<std::uint64_t> out;
  out.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) out.push_back(top - i);
  return out;
}

std::vector<SystemTraceRow> system_trace_rows(const Trace& t) {
  std::vector<SystemTraceRow> rows;
  rows.reserve(t.entries.size());
  SystemState cur = t.initial;
  for (std::size_t k = 0; k < t.entries.size(); ++k) {
    const auto& e = t.entries[k];
    cur = sys_step(cur, e.step).first;
    SystemTraceRow row;
    row.step = k;
    row.op = e.step;
    if (e.event) {
      row.event = e.event->kind;
      row.id = e.event->dg.id;
    }
    row.hiA = cur.sender.hiA;
    row.cur = cur.sender.cur;
    row.rcv_ack = cur.receiver.cum_ack();
    row.sz_s = cur.tbf_s.sz();
    row.sz_r = cur.tbf_r.sz();
    row.digest = e.post_digest;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_system_trace_csv(std::ostream& out, const Trace& t) {
  csv::write_row(out, {"step", "op", "event", "id", "hiA", "cur", "rcv_ack",
                       "sz_s", "sz_r", "digest"});
  for (const SystemTraceRow& r : system_trace_rows(t)) {
    std::ostringstream digest;
    digest << std::hex << r.digest;
    csv::write_row(out, {std::to_string(r.step), to_string(r.op),
                         r.event ? to_string(*r.event) : "",
                         r.id ? std::to_string(*r.id) : "",
                         std::to_string(r.hiA), std::to_string(r.cur),
                         std::to_string(r.rcv_ack), std::to_string(r.sz_s),
                         std::to_string(r.sz_r), digest.str()});
  }
}

std::vector<SystemTraceRow> read_system_trace_csv(std::istream& in) {
  std::vector<SystemTraceRow> rows;
  for (const auto& f : csv::read_with_header(
           in, {"step", "op", "event", "id", "hiA", "cur", "rcv_ack", "sz_s",
                "sz_r", "digest"})) {
    SystemTraceRow r;
    r.step = static_cast<std::size_t>(std::stoull(f[0]));
    r.op = parse_step(f[1]);
    if (!f[2].empty()) r.event = parse_action_kind(f[2]);
    if (!f[3].empty()) r.id = std::stoull(f[3]);
    if (r.event.has_value() != r.id.has_value()) {
      throw std::invalid_argument("system trace csv: event without id");
    }
    r.hiA = std::stoull(f[4]);
    r.cur = std::stoull(f[5]);
    r.rcv_ack = std::stoull(f[6]);
    r.sz_s = std::stoull(f[7]);
    r.sz_r = std::stoull(f[8]);
    r.digest = std::stoull(f[9], nullptr, 16);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rttforge
