#include "rttforge/system.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "rttforge/errors.hpp"
#include "rttforge/properties.hpp"

namespace rttforge {
namespace {

SystemState fresh(std::uint64_t N = 4) {
  return SystemState{SenderState::initial(N), ReceiverState(),
                     TbfState::empty({5, 10, 5, ExtNat::infinity()}),
                     TbfState::empty({3, 3, 3, ExtNat::infinity()})};
}

TEST(SysStep, SenderSndTouchesSenderAndTbfS) {
  const SystemState s = fresh();
  const auto [next, ev] = sys_step(s, Step::sender_snd("p"));
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (SysEvent{ActionKind::SndS, Datagram{1, "p"}}));
  EXPECT_EQ(next.tbf_s.ids(), std::vector<std::uint64_t>{1});
  EXPECT_EQ(next.sender.cur, 2u);
  EXPECT_EQ(next.receiver, s.receiver);
  EXPECT_EQ(next.tbf_r, s.tbf_r);
}

TEST(SysStep, ReceiverSndTouchesTbfROnly) {
  const SystemState s = fresh();
  const auto [next, ev] = sys_step(s, Step::receiver_snd());
  ASSERT_TRUE(ev);
  EXPECT_EQ(*ev, (SysEvent{ActionKind::SndR, Datagram{1, "ACK"}}));
  EXPECT_EQ(next.sender, s.sender);
  EXPECT_EQ(next.receiver, s.receiver);
  EXPECT_EQ(next.tbf_s, s.tbf_s);
  EXPECT_EQ(next.tbf_r.ids(), std::vector<std::uint64_t>{1});
}

TEST(SysStep, InternalStepsAreSilentAndLocal) {
  SystemState s = fresh();
  s = sys_step(s, Step::sender_snd("p")).first;
  s = sys_step(s, Step::receiver_snd()).first;
  for (const Step& st : {Step::tbf_s(InternalOp::Tick), Step::tbf_s(InternalOp::Decay),
                         Step::tbf_s(InternalOp::Drop, 0)}) {
    const auto [next, ev] = sys_step(s, st);
    EXPECT_FALSE(ev);
    EXPECT_EQ(next.sender, s.sender);
    EXPECT_EQ(next.receiver, s.receiver);
    EXPECT_EQ(next.tbf_r, s.tbf_r);
  }
  for (const Step& st : {Step::tbf_r(InternalOp::Tick), Step::tbf_r(InternalOp::Decay),
                         Step::tbf_r(InternalOp::Drop, 0)}) {
    const auto [next, ev] = sys_step(s, st);
    EXPECT_FALSE(ev);
    EXPECT_EQ(next.sender, s.sender);
    EXPECT_EQ(next.receiver, s.receiver);
    EXPECT_EQ(next.tbf_s, s.tbf_s);
  }
}

TEST(SysStep, TimeoutTouchesSenderOnly) {
  SystemState s = fresh(1);
  s = sys_step(s, Step::sender_snd("p")).first;
  const auto [next, ev] = sys_step(s, Step::sender_timeout());
  EXPECT_FALSE(ev);
  EXPECT_EQ(next.sender.cur, 1u);
  EXPECT_EQ(next.tbf_s, s.tbf_s);
  EXPECT_EQ(next.tbf_r, s.tbf_r);
}

TEST(SysStep, ReceiveWithEmptyQueueRejected) {
  try {
    sys_step(fresh(), Step::receiver_rcv(0));
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.component(), "tbf_s");
    EXPECT_EQ(e.rule(), "forward-index");
  }
}

TEST(SysStep, ReceiveWithoutTokensRejected) {
  SystemState s = fresh();
  s = sys_step(s, Step::sender_snd("p")).first;
  try {
    sys_step(s, Step::receiver_rcv(0));
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.component(), "tbf_s");
    EXPECT_EQ(e.rule(), "insufficient-tokens");
  }
}

TEST(SysStep, BadDropIndex) {
  try {
    sys_step(fresh(), Step::tbf_r(InternalOp::Drop, 0));
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.component(), "tbf_r");
    EXPECT_EQ(e.rule(), "drop-index");
  }
}

TEST(SysStep, OneRoundTripAdvancesWindow) {
  const Scenario sc = build_best_case(1);
  ASSERT_EQ(sc.script.size(), 6u);
  const Trace t = replay(sc.initial, sc.script);
  EXPECT_EQ(t.final_state.sender.hiA, 2u);
  EXPECT_EQ(to_execution(t),
            (Execution{Action::snd_s(1), Action::dlv_r(1), Action::snd_r(2),
                       Action::dlvr_r(2)}));
  EXPECT_EQ(t.dlv_events, 2u);
}

TEST(Replay, Empty) {
  const Trace t = replay(fresh(), {});
  EXPECT_TRUE(t.entries.empty());
  EXPECT_EQ(t.final_state, fresh());
}

TEST(Replay, DigestsChain) {
  const Scenario sc = build_best_case(3, 2);
  const Trace t = replay(sc.initial, sc.script);
  EXPECT_EQ(t.entries.front().pre_digest, sc.initial.digest());
  for (std::size_t k = 1; k < t.entries.size(); ++k) {
    EXPECT_EQ(t.entries[k].pre_digest, t.entries[k - 1].post_digest);
  }
  EXPECT_EQ(t.entries.back().post_digest, t.final_state.digest());
}

TEST(Replay, Deterministic) {
  const Scenario sc = build_best_case(4);
  const Trace a = replay(sc.initial, sc.script);
  const Trace b = replay(sc.initial, sc.script);
  EXPECT_EQ(a.final_state, b.final_state);
  std::ostringstream x, y;
  write_system_trace_csv(x, a);
  write_system_trace_csv(y, b);
  EXPECT_EQ(x.str(), y.str());
}

TEST(Replay, ReportsFirstBadStep) {
  const std::vector<Step> script{Step::sender_snd("p"), Step::sender_timeout()};
  try {
    replay(fresh(), script);
    FAIL() << "expected a script error";
  } catch (const ScriptError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
}

TEST(Efficiency, RepeatedReceives) {
  // FIFO forwarding takes the last element, so this delivers 1,2,2,1,3.
  SystemState s = fresh(5);
  s.sender = SenderState{5, 1, 3, 4};
  s.tbf_s.bucket = 5;
  for (std::uint64_t id : {3, 1, 2, 2, 1}) {
    s.tbf_s.data.push_back({ExtNat::infinity(), Datagram{id, "p"}});
  }
  std::vector<Step> fifo;
  for (std::size_t k = 0; k < 5; ++k) fifo.push_back(Step::receiver_rcv(4 - k));
  const Trace t = replay(s, fifo);
  EXPECT_EQ(t.packets_received_by_receiver, 5u);
  EXPECT_EQ(efficiency(t), Rational(3, 5));
}

TEST(Efficiency, AllLateArrivals) {
  SystemState s = fresh(5);
  s.sender = SenderState{5, 1, 4, 5};
  s.tbf_s.bucket = 4;
  for (std::uint64_t id : {1, 4, 3, 2}) {  // delivered as 2,3,4,1
    s.tbf_s.data.push_back({ExtNat::infinity(), Datagram{id, "p"}});
  }
  std::vector<Step> fifo;
  for (std::size_t k = 0; k < 4; ++k) fifo.push_back(Step::receiver_rcv(3 - k));
  EXPECT_EQ(efficiency(replay(s, fifo)), Rational(1, 4));
}

TEST(Efficiency, NeedsAReceive) {
  EXPECT_THROW(efficiency(replay(fresh(), {})), std::invalid_argument);
}

TEST(BestCase, FinalState) {
  for (std::uint64_t N : {1, 2, 5, 10}) {
    const Scenario sc = build_best_case(N);
    const Trace t = replay(sc.initial, sc.script);
    EXPECT_EQ(efficiency(t), Rational(1)) << N;
    EXPECT_EQ(t.final_state.sender, (SenderState{N, N + 1, N, N + 1})) << N;
    EXPECT_EQ(t.final_state.receiver.cum_ack(), N + 1) << N;
  }
}

TEST(BestCase, ManyWindows) {
  const Scenario sc = build_best_case(5, 5);
  const Trace t = replay(sc.initial, sc.script);
  EXPECT_EQ(efficiency(t), Rational(1));
  EXPECT_EQ(t.final_state.sender.hiA, 26u);
}

TEST(StepsToFill, Examples) {
  EXPECT_EQ(steps_to_fill(10, 1, 100), 10u);
  EXPECT_EQ(steps_to_fill(2, 1, 3), 1u);
  EXPECT_THROW(steps_to_fill(10, 1, 99), PreconditionError);
  EXPECT_THROW(steps_to_fill(1, 1, 99), PreconditionError);
  EXPECT_THROW(steps_to_fill(100, 1, 99), PreconditionError);
}

TEST(Predicted, Examples) {
  EXPECT_EQ(predicted_overtx_eff(10, 1, 100, 200), Rational(111, 200));
  EXPECT_EQ(predicted_overtx_eff(200, 20, 400, 4000), Rational(199, 1800));
  EXPECT_THROW(predicted_overtx_eff(1, 1, 100, 200), PreconditionError);
  EXPECT_THROW(predicted_overtx_eff(10, 1, 300, 200), PreconditionError);
}

TEST(Predicted, AtMostOneWithinPreconditions) {
  for (std::uint64_t rat = 1; rat <= 6; ++rat) {
    for (std::uint64_t R = rat + 1; R <= 12; ++R) {
      for (std::uint64_t d = R + 1; d <= 60; ++d) {
        if ((d - R) % (R - rat) != 0) continue;
        const std::uint64_t w = (d - R) / (R - rat);
        for (std::uint64_t N = std::max(d + 1, w * R + R + rat + 1); N <= 120; N += 7) {
          EXPECT_LE(predicted_overtx_eff(R, rat, d, N), Rational(1));
        }
      }
    }
  }
}

TEST(Overtx, ReplaysAndMatches) {
  const OvertxScenario sc = build_overtx(200, 10, 1, 100);
  EXPECT_EQ(sc.warmup, 10u);
  const Trace t = replay(sc.initial, sc.script);
  EXPECT_EQ(efficiency(t), Rational(111, 200));
  EXPECT_EQ(t.final_state.sender.hiA, 112u);
}

TEST(Overtx, RefusesBadParameters) {
  auto rule_of = [](auto f) -> std::string {
    try {
      f();
    } catch (const PreconditionError& e) {
      return e.rule();
    }
    return "";
  };
  EXPECT_EQ(rule_of([] { build_overtx(200, 1, 1, 100); }), "rate-not-above-refill");
  EXPECT_EQ(rule_of([] { build_overtx(200, 10, 1, 99); }), "fill-not-divisible");
  EXPECT_EQ(rule_of([] { build_overtx(105, 10, 1, 100); }), "no-over-transmission");
  EXPECT_EQ(rule_of([] { build_overtx(50, 10, 1, 100); }), "capacity-not-below-window");
  EXPECT_EQ(rule_of([] { build_overtx(200, 10, 0, 100); }), "refill-positive");
}

TEST(Simplified, TopDown) {
  EXPECT_EQ(top_down(5, 3), (std::vector<std::uint64_t>{5, 4, 3}));
  EXPECT_TRUE(top_down(5, 0).empty());
  EXPECT_THROW(top_down(2, 3), std::invalid_argument);
}

TEST(Simplified, SingleStep) {
  SimplifiedState s{{}, 100, 1, 1, 1, 200};
  s = single_step_simplified(s, 10, 1);
  EXPECT_EQ(s.chan, top_down(10, 9));
  EXPECT_EQ(s.ack, 2u);
  EXPECT_EQ(s.cur, 11u);
}

TEST(Simplified, WarmupMatchesReplay) {
  const OvertxScenario sc = build_overtx(200, 10, 1, 100);
  const std::vector<Step> prefix(sc.script.begin(),
                                 sc.script.begin() + static_cast<std::ptrdiff_t>(
                                                         sc.burst_ends.back()));
  const SystemState mid = replay(sc.initial, prefix).final_state;
  const SimplifiedState want =
      many_steps_simplified(simplify(sc.initial), 10, 1, sc.warmup);
  EXPECT_EQ(simplify(mid), want);
  EXPECT_EQ(want.chan, top_down(100, 90));
}

TEST(StepText, RoundTrip) {
  for (const Step& s :
       {Step::sender_snd("p"), Step::receiver_snd(), Step::sender_timeout(),
        Step::tbf_s(InternalOp::Tick), Step::tbf_s(InternalOp::Decay),
        Step::tbf_r(InternalOp::Drop, 2), Step::sender_rcv(3),
        Step::receiver_rcv(0)}) {
    EXPECT_EQ(parse_step(to_string(s)), s) << to_string(s);
  }
  EXPECT_EQ(to_string(Step::tbf_r(InternalOp::Drop, 2)), "tbf_r:drop:2");
  EXPECT_THROW(parse_step("tbf_s:drop"), std::invalid_argument);
  EXPECT_THROW(parse_step("jump"), std::invalid_argument);
  EXPECT_THROW(parse_step("receiver_rcv:x"), std::invalid_argument);
}

TEST(TraceCsv, RoundTrip) {
  const OvertxScenario sc = build_overtx(200, 10, 1, 100);
  const Trace t = replay(sc.initial, sc.script);
  std::stringstream ss;
  write_system_trace_csv(ss, t);
  EXPECT_EQ(read_system_trace_csv(ss), system_trace_rows(t));
}

TEST(Invariants, HoldAlongReplay) {
  const OvertxScenario sc = build_overtx(200, 10, 1, 100);
  SystemState s = sc.initial;
  for (const Step& st : sc.script) {
    s = sys_step(s, st).first;
    ASSERT_FALSE(system_invariant_violation(s)) << *system_invariant_violation(s);
  }
}

TEST(SystemProperties, Scenarios) {
  for (const SuiteResult& r : {best_case_suite(), overtx_suite(), warmup_suite()}) {
    EXPECT_TRUE(r.ok()) << r.name << ": "
                        << (r.failures.empty() ? "" : r.failures.front());
  }
}

}  // namespace
}  // namespace rttforge
