#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace rttforge {

struct Datagram {
  std::uint64_t id = 1;
  std::string payload;
  std::uint64_t size() const { return payload.size(); }
  friend bool operator==(const Datagram&, const Datagram&) = default;
};

inline const std::string kAckPayload = "ACK";

struct SenderState {
  std::uint64_t N = 1;
  std::uint64_t hiA = 1;
  std::optional<std::uint64_t> hiP;
  std::uint64_t cur = 1;

  static SenderState initial(std::uint64_t window);
  std::uint64_t hiP_or_zero() const { return hiP.value_or(0); }
  friend bool operator==(const SenderState&, const SenderState&) = default;
};

// hiA <= hiP + 1 and hiA <= cur <= hiA + N. Returns the broken one, if any.
std::optional<std::string> sender_invariant_violation(const SenderState& s);

SenderState rcv_ack(const SenderState& s, std::uint64_t a);
// Needs cur < hiA + N. Returns the new state and the transmitted datagram.
std::pair<SenderState, Datagram> adv_cur(const SenderState& s,
                                         std::string payload);
// Needs cur == hiA + N.
SenderState timeout(const SenderState& s);

// Set of received ids kept as a contiguous prefix 1..prefix plus whatever
// arrived beyond it. Without buffering, out-of-order arrivals are ignored and
// the overflow stays empty.
class ReceiverState {
 public:
  explicit ReceiverState(bool buffer_ooo = false) : buffer_ooo_(buffer_ooo) {}

  bool buffer_ooo() const { return buffer_ooo_; }
  bool contains(std::uint64_t i) const;
  // min of the positive integers not received.
  std::uint64_t cum_ack() const { return prefix_ + 1; }
  // 0 when nothing was received.
  std::uint64_t max_received() const;
  std::set<std::uint64_t> to_set() const;
  bool subset_of(const ReceiverState& other) const;

  // Inserts without any mode check; used by rcv_pkt.
  void insert(std::uint64_t i);

  friend bool operator==(const ReceiverState&, const ReceiverState&) = default;

 private:
  std::uint64_t prefix_ = 0;
  std::set<std::uint64_t> overflow_;
  bool buffer_ooo_ = false;
};

ReceiverState rcv_pkt(const ReceiverState& r, std::uint64_t i);
std::uint64_t cum_ack(const ReceiverState& r);
Datagram snd_ack(const ReceiverState& r);

// a is the cumulative ACK for rcvd: it is missing and every smaller positive
// id is present.
bool is_cum_ack(const std::set<std::uint64_t>& rcvd, std::uint64_t a);

}  // namespace rttforge
