#include "rttforge/tbf.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "rttforge/errors.hpp"
#include "rttforge/properties.hpp"

namespace rttforge {
namespace {

TbfParams params(std::uint64_t b_cap, std::uint64_t d_cap, std::uint64_t rat,
                 ExtNat ttl = ExtNat::infinity()) {
  return TbfParams{b_cap, d_cap, rat, ttl};
}

Datagram dg(std::uint64_t id, std::string payload = "p") {
  return Datagram{id, std::move(payload)};
}

TbfState with_ids(const TbfParams& p, std::uint64_t bucket,
                  const std::vector<std::uint64_t>& ids) {
  TbfState t = TbfState::empty(p, bucket);
  for (std::uint64_t id : ids) t.data.push_back({p.ttl, dg(id)});
  return t;
}

TEST(TbfParams, Validation) {
  EXPECT_NO_THROW(params(5, 5, 5).validate());
  EXPECT_THROW(params(0, 5, 1).validate(), std::invalid_argument);
  EXPECT_THROW(params(5, 0, 1).validate(), std::invalid_argument);
  EXPECT_THROW(params(5, 5, 0).validate(), std::invalid_argument);
  EXPECT_THROW(params(2, 5, 3).validate(), std::invalid_argument);
  EXPECT_THROW(params(5, 5, 1, ExtNat::finite(0)).validate(), std::invalid_argument);
  EXPECT_THROW(TbfState::empty(params(2, 2, 1), 3), std::invalid_argument);
}

TEST(Tick, RefillsUpToCap) {
  TbfState t = TbfState::empty(params(5, 10, 3));
  t = tick(t);
  EXPECT_EQ(t.bucket, 3u);
  t = tick(t);
  EXPECT_EQ(t.bucket, 5u);
}

TEST(Tick, AgesOut) {
  TbfState t = process(TbfState::empty(params(5, 10, 1, ExtNat::finite(1))), dg(7));
  std::vector<std::uint64_t> expired;
  t = tick(t, expired);
  EXPECT_TRUE(t.data.empty());
  EXPECT_EQ(expired, std::vector<std::uint64_t>{7});
}

TEST(Tick, InfiniteTtlNeverAges) {
  TbfState t = process(TbfState::empty(params(5, 10, 1)), dg(7));
  for (int i = 0; i < 1000; ++i) t = tick(t);
  ASSERT_EQ(t.data.size(), 1u);
  EXPECT_EQ(t.data[0].remaining, ExtNat::infinity());
}

TEST(Tick, DecrementsRemaining) {
  TbfState t = process(TbfState::empty(params(5, 10, 1, ExtNat::finite(3))), dg(7));
  t = tick(t);
  EXPECT_EQ(t.data[0].remaining, ExtNat::finite(2));
}

TEST(Decay, FloorsAtZero) {
  EXPECT_EQ(decay(TbfState::empty(params(5, 5, 1), 0)).bucket, 0u);
  EXPECT_EQ(decay(TbfState::empty(params(5, 5, 1), 5)).bucket, 4u);
  EXPECT_EQ(tick(decay(TbfState::empty(params(5, 5, 5), 5))).bucket, 5u);
}

TEST(Process, InsertsAtHead) {
  TbfState t = TbfState::empty(params(5, 10, 1, ExtNat::finite(4)));
  t = process(t, dg(1, "abc"));
  t = process(t, dg(2));
  EXPECT_EQ(t.ids(), (std::vector<std::uint64_t>{2, 1}));
  EXPECT_EQ(t.sz(), 4u);
  EXPECT_EQ(t.data[1].remaining, ExtNat::finite(4));
}

TEST(Process, RefusesWhenFull) {
  TbfState t = process(TbfState::empty(params(5, 3, 1)), dg(1, "abc"));
  EXPECT_EQ(process(t, dg(2)), t);
  // Larger than d_cap: never enqueued.
  const TbfState empty = TbfState::empty(params(5, 3, 1));
  EXPECT_FALSE(fits(empty, dg(3, "abcd")));
  EXPECT_EQ(process(empty, dg(3, "abcd")), empty);
}

TEST(Process, OversizedForBucketIsStuck) {
  TbfState t = process(TbfState::empty(params(2, 10, 2)), dg(1, "abcd"));
  for (int i = 0; i < 5; ++i) t = tick(t);
  EXPECT_EQ(t.bucket, 2u);
  EXPECT_THROW(forward(t, 0), PreconditionError);
}

TEST(Drop, RemovesAndKeepsOrder) {
  const TbfState t = with_ids(params(5, 10, 1), 0, {4, 5, 6});
  EXPECT_EQ(drop(t, 1).ids(), (std::vector<std::uint64_t>{4, 6}));
  EXPECT_TRUE(drop(with_ids(params(5, 10, 1), 0, {4}), 0).data.empty());
  EXPECT_THROW(drop(t, 3), std::out_of_range);
}

TEST(Forward, SpendsTokens) {
  TbfState t = TbfState::empty(params(3, 10, 3), 3);
  t = process(t, dg(1, "ACK"));
  const auto [next, out] = forward(t, 0);
  EXPECT_EQ(next.bucket, 0u);
  EXPECT_EQ(out, dg(1, "ACK"));
  EXPECT_TRUE(next.data.empty());
}

TEST(Forward, Rejections) {
  TbfState t = process(TbfState::empty(params(3, 10, 3), 2), dg(1, "ACK"));
  try {
    forward(t, 0);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.rule(), "insufficient-tokens");
  }
  EXPECT_THROW(forward(t, 1), std::out_of_range);
}

TEST(Forward, MiddleIndexKeepsOthers) {
  const TbfState t = with_ids(params(5, 10, 1), 5, {4, 5, 6});
  EXPECT_EQ(forward(t, 1).first.ids(), (std::vector<std::uint64_t>{4, 6}));
}

TEST(Ops, NeverChangeParams) {
  const TbfParams p = params(5, 10, 2, ExtNat::finite(3));
  const TbfState t = with_ids(p, 5, {1, 2});
  EXPECT_EQ(drop(t, 0).params, p);
  EXPECT_EQ(forward(t, 0).first.params, p);
  EXPECT_EQ(process(t, dg(3)).params, p);
  EXPECT_EQ(tick(t).params, p);
  EXPECT_EQ(decay(t).params, p);
}

TEST(Invariant, Detects) {
  TbfState t = TbfState::empty(params(5, 2, 1));
  EXPECT_FALSE(tbf_invariant_violation(t));
  t.bucket = 6;
  EXPECT_TRUE(tbf_invariant_violation(t));
  t.bucket = 0;
  t.data.push_back({ExtNat::infinity(), dg(1, "abc")});
  EXPECT_TRUE(tbf_invariant_violation(t));
}

TEST(TokenBound, Examples) {
  const TbfState start = TbfState::empty(params(5, 10, 5));
  EXPECT_TRUE(token_bound_check(start, {TbfOp{TbfOpKind::Tick, 0, {}}}));
  std::vector<TbfOp> ops{{TbfOpKind::Process, 0, dg(1, "ab")},
                         {TbfOpKind::Process, 0, dg(2, "abc")},
                         {TbfOpKind::Process, 0, dg(3, "a")},
                         {TbfOpKind::Tick, 0, {}},
                         {TbfOpKind::Forward, 2, {}},
                         {TbfOpKind::Forward, 1, {}}};
  EXPECT_TRUE(token_bound_check(start, ops));
  ops.push_back({TbfOpKind::Forward, 0, {}});
  EXPECT_THROW(token_bound_check(start, ops), PreconditionError);
}

TEST(TokenBound, DecayBetweenTicks) {
  const TbfState start = TbfState::empty(params(4, 10, 4));
  const std::vector<TbfOp> ops{{TbfOpKind::Process, 0, dg(1, "ab")},
                               {TbfOpKind::Tick, 0, {}},
                               {TbfOpKind::Decay, 0, {}},
                               {TbfOpKind::Forward, 0, {}}};
  EXPECT_TRUE(token_bound_check(start, ops));
}

TEST(Compose, EmptyPair) {
  const TbfState a = abstract_compose(TbfState::empty(params(2, 3, 1)),
                                      TbfState::empty(params(5, 7, 4), 2));
  EXPECT_EQ(a.params, params(5, 10, 4));
  EXPECT_EQ(a.bucket, 2u);
  EXPECT_TRUE(a.data.empty());
}

TEST(Compose, RemainingAddsSecondTtl) {
  TbfState t1 = TbfState::empty(params(2, 3, 1, ExtNat::finite(4)));
  t1.data.push_back({ExtNat::finite(2), dg(1)});
  const TbfState t2 = with_ids(params(5, 7, 4, ExtNat::finite(3)), 0, {2});
  const TbfState a = abstract_compose(t1, t2);
  EXPECT_EQ(a.params.ttl, ExtNat::finite(7));
  EXPECT_EQ(a.ids(), (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(a.data[0].remaining, ExtNat::finite(5));
  EXPECT_EQ(a.data[1].remaining, ExtNat::finite(3));
}

TEST(Compose, InfiniteTtlAbsorbs) {
  const TbfState a = abstract_compose(TbfState::empty(params(2, 3, 1)),
                                      TbfState::empty(params(5, 7, 4, ExtNat::finite(2))));
  EXPECT_EQ(a.params.ttl, ExtNat::infinity());
}

TEST(Equiv, Cases) {
  const TbfParams p = params(5, 10, 2);
  EXPECT_TRUE(tbf_equiv(with_ids(p, 1, {1, 2}), with_ids(p, 1, {1, 2})));
  EXPECT_TRUE(tbf_equiv(with_ids(p, 1, {1, 2}), with_ids(p, 4, {2, 1})));
  EXPECT_FALSE(tbf_equiv(with_ids(p, 1, {1, 2}), with_ids(p, 1, {1, 2, 3})));
  EXPECT_FALSE(tbf_equiv(with_ids(p, 1, {1}), with_ids(params(5, 10, 3), 1, {1})));
}

TEST(Serial, EmptyScript) {
  const auto r = simulate_serial(TbfState::empty(params(1, 1, 1)),
                                 TbfState::empty(params(1, 1, 1)), {});
  EXPECT_TRUE(r.equivalent);
  EXPECT_EQ(r.steps, 0u);
}

TEST(Serial, HopTickForward) {
  const TbfState t1 = TbfState::empty(params(3, 5, 3), 3);
  const TbfState t2 = TbfState::empty(params(3, 5, 3), 0);
  const std::vector<SerialOp> script{{SerialOpKind::Process1, 0, dg(1, "ab")},
                                     {SerialOpKind::Hop, 0, {}},
                                     {SerialOpKind::Tick2, 0, {}},
                                     {SerialOpKind::Forward2, 0, {}}};
  const auto r = simulate_serial(t1, t2, script);
  EXPECT_TRUE(r.equivalent);
  EXPECT_EQ(r.steps, 4u);
  EXPECT_TRUE(r.second.data.empty());
  EXPECT_TRUE(r.abstract.data.empty());
  EXPECT_EQ(r.abstract.bucket, 1u);
  const std::vector<std::string> want{"0: process 1", "1: noop", "2: tick",
                                      "3: forward 1"};
  EXPECT_EQ(r.mirror_log, want);
}

TEST(Serial, AgeOutInFirstBecomesDrop) {
  const TbfState t1 = TbfState::empty(params(3, 5, 3, ExtNat::finite(1)));
  const TbfState t2 = TbfState::empty(params(3, 5, 3, ExtNat::finite(2)));
  const std::vector<SerialOp> script{{SerialOpKind::Process1, 0, dg(1)},
                                     {SerialOpKind::Tick1, 0, {}}};
  const auto r = simulate_serial(t1, t2, script);
  EXPECT_TRUE(r.equivalent);
  EXPECT_TRUE(r.abstract.data.empty());
  EXPECT_EQ(r.mirror_log.back(), "1: drop 1");
}

TEST(Serial, HopIntoFullSecondBecomesDrop) {
  const TbfState t1 = TbfState::empty(params(3, 5, 3), 3);
  const TbfState t2 = with_ids(params(3, 1, 3), 0, {9});
  const auto r = simulate_serial(
      t1, t2, {{SerialOpKind::Process1, 0, dg(1)}, {SerialOpKind::Hop, 0, {}}});
  EXPECT_TRUE(r.equivalent);
  EXPECT_EQ(r.abstract.ids(), std::vector<std::uint64_t>{9});
}

TEST(Serial, UnsynchronizedTicksBreakTheAbstraction) {
  const TbfState t1 = TbfState::empty(params(3, 5, 3, ExtNat::finite(2)));
  const TbfState t2 = TbfState::empty(params(3, 5, 3, ExtNat::finite(1)));
  const std::vector<SerialOp> script{{SerialOpKind::Process1, 0, dg(1)},
                                     {SerialOpKind::Tick2, 0, {}},
                                     {SerialOpKind::Tick2, 0, {}},
                                     {SerialOpKind::Tick2, 0, {}}};
  const auto r = simulate_serial(t1, t2, script);
  EXPECT_FALSE(r.equivalent);
  EXPECT_EQ(r.failure, "abstract-age-out-before-serial");
  EXPECT_EQ(r.failure_index, 3u);
}

TEST(Serial, InvalidStepsCarryTheirIndex) {
  const TbfState t1 = TbfState::empty(params(3, 5, 3), 0);
  const TbfState t2 = TbfState::empty(params(3, 5, 3), 0);
  try {
    simulate_serial(t1, t2, {{SerialOpKind::Process1, 0, dg(1)},
                             {SerialOpKind::Hop, 0, {}}});
    FAIL() << "expected a script error";
  } catch (const ScriptError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(simulate_serial(t1, t2, {{SerialOpKind::Drop2, 0, {}}}), ScriptError);
  EXPECT_THROW(simulate_serial(t1, t2, {{SerialOpKind::Process1, 0, dg(1)},
                                        {SerialOpKind::Process1, 0, dg(1)}}),
               ScriptError);
}

TEST(Trace, RoundTrip) {
  const TbfState start = TbfState::empty(params(5, 10, 2));
  const std::vector<TbfOp> ops{{TbfOpKind::Process, 0, dg(1, "ab")},
                               {TbfOpKind::Process, 0, dg(2, "abc")},
                               {TbfOpKind::Tick, 0, {}},
                               {TbfOpKind::Forward, 1, {}},
                               {TbfOpKind::Decay, 0, {}},
                               {TbfOpKind::Drop, 0, {}}};
  const auto rows = tbf_trace(start, ops);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].op, "init");
  EXPECT_EQ(rows[2].ids, (std::vector<std::uint64_t>{2, 1}));
  EXPECT_EQ(rows[4].bucket, 0u);
  EXPECT_EQ(rows[4].ids, std::vector<std::uint64_t>{2});
  EXPECT_TRUE(rows[6].ids.empty());
  std::stringstream ss;
  write_tbf_trace_csv(ss, rows);
  EXPECT_EQ(read_tbf_trace_csv(ss), rows);
}

TEST(TbfProperties, TokenBound) {
  const SuiteResult r = token_bound_suite(23, 2000);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
}

TEST(TbfProperties, StateInvariants) {
  const SuiteResult r = tbf_state_suite(23, 500);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
}

TEST(TbfProperties, Composition) {
  const SuiteResult r = composition_suite(23, 300);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
  EXPECT_GT(r.counter("scripts-with-age-out"), 0u);
  EXPECT_GT(r.counter("scripts-with-decay"), 0u);
}

}  // namespace
}  // namespace rttforge
