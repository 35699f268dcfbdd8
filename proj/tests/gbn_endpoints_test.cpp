#include "rttforge/gbn_endpoints.hpp"

#include <gtest/gtest.h>

#include "rttforge/errors.hpp"
#include "rttforge/properties.hpp"

namespace rttforge {
namespace {

SenderState make(std::uint64_t n, std::uint64_t hiA,
                 std::optional<std::uint64_t> hiP, std::uint64_t cur) {
  return SenderState{n, hiA, hiP, cur};
}

TEST(Sender, Initial) {
  const SenderState s = SenderState::initial(4);
  EXPECT_EQ(s, make(4, 1, std::nullopt, 1));
  EXPECT_FALSE(sender_invariant_violation(s));
  EXPECT_THROW(SenderState::initial(0), PreconditionError);
}

TEST(Sender, RcvAckSlides) {
  EXPECT_EQ(rcv_ack(make(10, 1, 1, 2), 2), make(10, 2, 1, 2));
  // cur is pulled forward when the ACK overtakes it.
  EXPECT_EQ(rcv_ack(make(10, 1, 5, 2), 4), make(10, 4, 5, 4));
}

TEST(Sender, RcvAckIgnoresOldAndUnsent) {
  const SenderState s = make(10, 3, 5, 6);
  EXPECT_EQ(rcv_ack(s, 3), s);
  EXPECT_EQ(rcv_ack(s, 2), s);
  EXPECT_EQ(rcv_ack(s, 7), s);
  EXPECT_EQ(rcv_ack(make(2, 1, std::nullopt, 1), 2), make(2, 1, std::nullopt, 1));
}

TEST(Sender, AdvCurFirstSend) {
  const auto [s, dg] = adv_cur(SenderState::initial(2), "p");
  EXPECT_EQ(dg, (Datagram{1, "p"}));
  EXPECT_EQ(s, make(2, 1, 1, 2));
}

TEST(Sender, AdvCurWindowFull) {
  try {
    adv_cur(make(2, 1, 2, 3), "p");
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.rule(), "window-full");
  }
}

TEST(Sender, RetransmissionKeepsHiP) {
  SenderState s = make(3, 1, 3, 4);
  s = timeout(s);
  EXPECT_EQ(s, make(3, 1, 3, 1));
  std::vector<std::uint64_t> ids;
  for (int k = 0; k < 3; ++k) {
    auto [next, dg] = adv_cur(s, "x");
    ids.push_back(dg.id);
    EXPECT_EQ(next.hiP, 3u);
    s = next;
  }
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(s.cur, 4u);
}

TEST(Sender, TimeoutTwiceRejected) {
  const SenderState s = timeout(make(3, 1, 3, 4));
  try {
    timeout(s);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.rule(), "timeout-before-window-full");
  }
}

TEST(Sender, InvariantViolations) {
  EXPECT_TRUE(sender_invariant_violation(make(3, 3, 1, 3)));
  EXPECT_TRUE(sender_invariant_violation(make(3, 2, 4, 1)));
  EXPECT_TRUE(sender_invariant_violation(make(3, 2, 4, 6)));
  EXPECT_FALSE(sender_invariant_violation(make(3, 2, 4, 5)));
}

TEST(Receiver, DefaultModeAcceptsInOrderOnly) {
  ReceiverState r;
  r = rcv_pkt(r, 1);
  EXPECT_EQ(r.to_set(), (std::set<std::uint64_t>{1}));
  r = rcv_pkt(r, 3);
  EXPECT_EQ(r.to_set(), (std::set<std::uint64_t>{1}));
  EXPECT_EQ(cum_ack(r), 2u);
  r = rcv_pkt(r, 2);
  r = rcv_pkt(r, 2);
  EXPECT_EQ(cum_ack(r), 3u);
  EXPECT_EQ(r.max_received(), 2u);
}

TEST(Receiver, BufferingAbsorbsRuns) {
  ReceiverState r(true);
  r = rcv_pkt(rcv_pkt(r, 1), 3);
  EXPECT_EQ(r.to_set(), (std::set<std::uint64_t>{1, 3}));
  EXPECT_EQ(cum_ack(r), 2u);
  r = rcv_pkt(rcv_pkt(r, 4), 2);
  EXPECT_EQ(cum_ack(r), 5u);
  EXPECT_EQ(r.max_received(), 4u);
  EXPECT_TRUE(r.contains(3));
  EXPECT_FALSE(r.contains(5));
}

TEST(Receiver, CumAckExamples) {
  EXPECT_EQ(cum_ack(ReceiverState{}), 1u);
  ReceiverState r;
  for (std::uint64_t i = 1; i <= 3; ++i) r = rcv_pkt(r, i);
  EXPECT_EQ(cum_ack(r), 4u);
  EXPECT_EQ(ReceiverState{}.max_received(), 0u);
}

TEST(Receiver, SndAckIsPure) {
  ReceiverState r;
  r = rcv_pkt(rcv_pkt(r, 1), 2);
  EXPECT_EQ(snd_ack(r), (Datagram{3, "ACK"}));
  EXPECT_EQ(snd_ack(r), snd_ack(r));
}

TEST(Receiver, Subset) {
  ReceiverState a(true), b(true);
  a = rcv_pkt(a, 3);
  b = rcv_pkt(rcv_pkt(b, 1), 3);
  EXPECT_TRUE(a.subset_of(b));
  EXPECT_FALSE(b.subset_of(a));
  ReceiverState c(true);
  c = rcv_pkt(rcv_pkt(rcv_pkt(c, 1), 2), 3);
  EXPECT_TRUE(b.subset_of(c));
  ReceiverState d(true);
  d = rcv_pkt(rcv_pkt(d, 2), 3);
  EXPECT_FALSE(c.subset_of(d));
}

TEST(CumAck, ExactlyOneWitnessPerSubset) {
  for (unsigned mask = 0; mask < 256; ++mask) {
    std::set<std::uint64_t> rcvd;
    for (unsigned b = 0; b < 8; ++b) {
      if (mask & (1u << b)) rcvd.insert(b + 1);
    }
    int witnesses = 0;
    std::uint64_t found = 0;
    for (std::uint64_t a = 0; a <= 10; ++a) {
      if (is_cum_ack(rcvd, a)) {
        ++witnesses;
        found = a;
      }
    }
    EXPECT_EQ(witnesses, 1) << mask;
    ReceiverState r(true);
    for (std::uint64_t i : rcvd) r = rcv_pkt(r, i);
    EXPECT_EQ(found, cum_ack(r)) << mask;
  }
}

TEST(GbnProperties, RandomStepSequences) {
  const SuiteResult r = gbn_endpoint_suite(17, 2000);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
}

}  // namespace
}  // namespace rttforge
