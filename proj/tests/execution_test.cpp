#include "rttforge/execution.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace rttforge {
namespace {

Execution fifo_variant() {
  Execution e = example_execution();
  e.insert(e.end() - 1, Action::dlvr_r(3));
  return e;
}

TEST(Validate, ExampleIsValid) { EXPECT_TRUE(validate(example_execution()).ok()); }

TEST(Validate, ZeroId) {
  const auto r = validate({Action::snd_s(0)});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (Violation{0, "id-positive"}));
}

TEST(Validate, DeliveryBeforeSend) {
  const auto r = validate({Action::dlv_r(1), Action::snd_s(1)});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (Violation{0, "delivery-without-send"}));
  const auto acks = validate({Action::snd_s(1), Action::dlvr_r(1)});
  ASSERT_EQ(acks.violations.size(), 1u);
  EXPECT_EQ(acks.violations[0], (Violation{1, "delivery-without-send"}));
}

TEST(Validate, SenderSkipsAnId) {
  const auto r = validate({Action::snd_s(1), Action::snd_s(3)});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (Violation{1, "sender-order"}));
}

TEST(Validate, AcksGoBackwards) {
  const auto r = validate({Action::snd_r(3), Action::snd_r(2)});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (Violation{1, "ack-monotone"}));
  EXPECT_THROW(require_valid({Action::snd_r(3), Action::snd_r(2)}),
               InvalidExecution);
}

TEST(FifoAck, Example) {
  // ACK 3 is transmitted but never delivered before ACK 4.
  EXPECT_FALSE(is_fifo_ack(example_execution()));
  EXPECT_TRUE(is_fifo_ack(fifo_variant()));
  EXPECT_TRUE(is_fifo_ack({}));
}

TEST(FifoAck, RejectsInvalid) {
  EXPECT_THROW(is_fifo_ack({Action::dlvr_r(1)}), InvalidExecution);
}

TEST(TauClock, CountsSenderEventsOnly) {
  const std::vector<std::uint64_t> want{1, 2, 3, 3, 3, 4, 4, 5, 5, 5, 5};
  EXPECT_EQ(tau_clock(example_execution()), want);
}

TEST(Rtt, Example) {
  const Execution e = example_execution();
  EXPECT_EQ(rtt(e, 1), 4u);
  EXPECT_EQ(rtt(e, 2), 3u);
  EXPECT_EQ(rtt(e, 3), 1u);
  EXPECT_EQ(rtt(e, 4), std::nullopt);
  EXPECT_EQ(rtt(e, 0), std::nullopt);
}

TEST(Rtt, RetransmittedBeforeAckIsUndefined) {
  const Execution e{Action::snd_s(1), Action::snd_s(1), Action::dlv_r(1),
                    Action::snd_r(2), Action::dlvr_r(2)};
  EXPECT_EQ(rtt(e, 1), std::nullopt);
}

TEST(Rtt, ResendAfterAckDoesNotMatter) {
  const Execution e{Action::snd_s(1), Action::dlv_r(1), Action::snd_r(2),
                    Action::dlvr_r(2), Action::snd_s(1)};
  EXPECT_EQ(rtt(e, 1), 1u);
}

TEST(Rtt, AckForSameIdDoesNotCount) {
  // A cumulative ACK carrying i says i is still expected.
  const Execution e{Action::snd_s(1), Action::snd_r(1), Action::dlvr_r(1)};
  EXPECT_EQ(rtt(e, 1), std::nullopt);
}

TEST(Names, RoundTrip) {
  for (ActionKind k : {ActionKind::SndS, ActionKind::DlvR, ActionKind::SndR,
                       ActionKind::DlvrR}) {
    EXPECT_EQ(parse_action_kind(to_string(k)), k);
  }
  EXPECT_EQ(actor_of(ActionKind::SndS), "sender");
  EXPECT_EQ(actor_of(ActionKind::DlvR), "channel");
  EXPECT_EQ(actor_of(ActionKind::SndR), "receiver");
  EXPECT_EQ(actor_of(ActionKind::DlvrR), "channel");
  EXPECT_THROW(parse_action_kind("send"), std::invalid_argument);
}

TEST(Csv, RoundTrip) {
  std::stringstream ss;
  write_execution_csv(ss, example_execution());
  EXPECT_EQ(ss.str().substr(0, 36), "index,actor,action,id\n0,sender,snd_s");
  EXPECT_EQ(read_execution_csv(ss), example_execution());
}

TEST(Csv, RejectsMismatchedActor) {
  std::istringstream in("index,actor,action,id\n0,receiver,snd_s,1\n");
  EXPECT_THROW(read_execution_csv(in), std::invalid_argument);
}

TEST(Csv, RejectsIndexGap) {
  std::istringstream in("index,actor,action,id\n1,sender,snd_s,1\n");
  EXPECT_THROW(read_execution_csv(in), std::invalid_argument);
}

TEST(Csv, RejectsBadHeader) {
  std::istringstream in("i,actor,action,id\n0,sender,snd_s,1\n");
  EXPECT_ANY_THROW(read_execution_csv(in));
}

TEST(Generator, OutputValidatesAndIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ExecConfig cfg;
    cfg.n_packets = 1 + seed % 12;
    cfg.loss_rate = Rational(static_cast<long long>(seed % 4), 10);
    cfg.reorder_window = seed % 3;
    cfg.allow_ack_loss = seed % 2 == 0;
    cfg.fifo_acks = seed % 5 == 0;
    cfg.max_retransmissions = seed % 4;
    cfg.allow_duplication = seed % 3 == 0;
    cfg.seed = seed;
    const Execution e = gen_execution(cfg);
    EXPECT_TRUE(validate(e).ok()) << "seed " << seed;
    if (cfg.fifo_acks) EXPECT_TRUE(is_fifo_ack(e)) << "seed " << seed;
    EXPECT_EQ(gen_execution(cfg), e);
  }
}

TEST(Generator, SendsStayWithinPacketCount) {
  ExecConfig cfg;
  cfg.n_packets = 7;
  cfg.loss_rate = Rational(1, 5);
  cfg.max_retransmissions = 3;
  cfg.seed = 99;
  for (const Action& a : gen_execution(cfg)) {
    if (a.kind == ActionKind::SndS) EXPECT_LE(a.id, 7u);
  }
}

}  // namespace
}  // namespace rttforge
