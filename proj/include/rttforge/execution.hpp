#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rttforge/numerics.hpp"

namespace rttforge {

// snd_s: sender transmits a packet. dlv_r: channel delivers it to the
// receiver. snd_r: receiver transmits a cumulative ACK. dlvr_r: channel
// delivers that ACK to the sender.
enum class ActionKind { SndS, DlvR, SndR, DlvrR };

struct Action {
  ActionKind kind = ActionKind::SndS;
  std::uint64_t id = 1;

  static Action snd_s(std::uint64_t id) { return {ActionKind::SndS, id}; }
  static Action dlv_r(std::uint64_t id) { return {ActionKind::DlvR, id}; }
  static Action snd_r(std::uint64_t id) { return {ActionKind::SndR, id}; }
  static Action dlvr_r(std::uint64_t id) { return {ActionKind::DlvrR, id}; }

  // Events observed at the sender; these drive the Karn clock.
  bool is_sender_event() const {
    return kind == ActionKind::SndS || kind == ActionKind::DlvrR;
  }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string to_string(ActionKind kind);  // snd_s | dlv_r | snd_r | dlvr_r
ActionKind parse_action_kind(const std::string& text);
// sender | channel | receiver
std::string actor_of(ActionKind kind);
std::string to_string(const Action& a);

using Execution = std::vector<Action>;

struct Violation {
  std::size_t index;
  std::string rule;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidityReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Rule names: "id-positive", "delivery-without-send", "sender-order",
// "ack-monotone".
ValidityReport validate(const Execution& e);

class InvalidExecution : public std::invalid_argument {
 public:
  explicit InvalidExecution(const ValidityReport& report);
  const ValidityReport& report() const { return report_; }

 private:
  ValidityReport report_;
};

void require_valid(const Execution& e);

// Delivered ACK ids always form a prefix of the transmitted ACK ids.
bool is_fifo_ack(const Execution& e);

// Karn clock value at every event: 1 plus the number of sender events
// strictly before it.
std::vector<std::uint64_t> tau_clock(const Execution& e);

// Round-trip time of packet i in Karn clock ticks: the clock at the first
// ACK delivery with id > i minus the clock at the first transmission of i.
// Undefined unless i was transmitted exactly once before that delivery.
// Assumes e is valid.
std::optional<std::uint64_t> rtt(const Execution& e, std::uint64_t i);

struct ExecConfig {
  std::uint64_t n_packets = 0;
  Rational loss_rate{0};
  std::uint64_t reorder_window = 0;
  bool allow_ack_loss = false;
  bool fifo_acks = false;
  std::uint64_t max_retransmissions = 0;
  bool allow_duplication = false;
  std::uint64_t seed = 0;
};

// Randomized sender/channel/receiver run. The sender keeps at most four
// unacknowledged packets outstanding, the receiver acknowledges every
// delivery cumulatively. Output always validates.
Execution gen_execution(const ExecConfig& cfg);

void write_execution_csv(std::ostream& out, const Execution& e);
Execution read_execution_csv(std::istream& in);

// The worked example execution with a single Karn sample of 4.
Execution example_execution();

}  // namespace rttforge
