#include "rttforge/gbn_endpoints.hpp"

#include <algorithm>

#include "rttforge/errors.hpp"

namespace rttforge {

SenderState SenderState::initial(std::uint64_t window) {
  if (window == 0) throw PreconditionError("sender", "window-positive");
  return SenderState{window, 1, std::nullopt, 1};
}

std::optional<std::string> sender_invariant_violation(const SenderState& s) {
  if (s.hiA > s.hiP_or_zero() + 1) return "hiA exceeds hiP + 1";
  if (s.cur < s.hiA) return "cur below hiA";
  if (s.cur > s.hiA + s.N) return "cur beyond hiA + N";
  return std::nullopt;
}

SenderState rcv_ack(const SenderState& s, std::uint64_t a) {
  if (s.hiA < a && a <= s.hiP_or_zero() + 1) {
    SenderState next = s;
    next.hiA = a;
    next.cur = std::max(s.cur, a);
    return next;
  }
  return s;
}

std::pair<SenderState, Datagram> adv_cur(const SenderState& s,
                                         std::string payload) {
  if (s.cur >= s.hiA + s.N) {
    throw PreconditionError("sender", "window-full",
                            "cur=" + std::to_string(s.cur));
  }
  SenderState next = s;
  next.hiP = std::max(s.hiP_or_zero(), s.cur);
  next.cur = s.cur + 1;
  return {next, Datagram{s.cur, std::move(payload)}};
}

SenderState timeout(const SenderState& s) {
  if (s.cur != s.hiA + s.N) {
    throw PreconditionError("sender", "timeout-before-window-full",
                            "cur=" + std::to_string(s.cur));
  }
  SenderState next = s;
  next.cur = s.hiA;
  return next;
}

bool ReceiverState::contains(std::uint64_t i) const {
  return (i >= 1 && i <= prefix_) || overflow_.contains(i);
}

std::uint64_t ReceiverState::max_received() const {
  return overflow_.empty() ? prefix_ : *overflow_.rbegin();
}

std::set<std::uint64_t> ReceiverState::to_set() const {
  std::set<std::uint64_t> out(overflow_);
  for (std::uint64_t i = 1; i <= prefix_; ++i) out.insert(i);
  return out;
}

bool ReceiverState::subset_of(const ReceiverState& other) const {
  if (prefix_ > other.prefix_) {
    for (std::uint64_t i = other.prefix_ + 1; i <= prefix_; ++i) {
      if (!other.overflow_.contains(i)) return false;
    }
  }
  return std::all_of(overflow_.begin(), overflow_.end(),
                     [&](std::uint64_t i) { return other.contains(i); });
}

void ReceiverState::insert(std::uint64_t i) {
  if (i == 0 || contains(i)) return;
  if (i != prefix_ + 1) {
    overflow_.insert(i);
    return;
  }
  prefix_ = i;
  // Absorb any buffered run that now continues the prefix.
  auto it = overflow_.begin();
  while (it != overflow_.end() && *it == prefix_ + 1) {
    prefix_ = *it;
    it = overflow_.erase(it);
  }
}

ReceiverState rcv_pkt(const ReceiverState& r, std::uint64_t i) {
  ReceiverState next = r;
  if (r.buffer_ooo() || i == r.cum_ack()) next.insert(i);
  return next;
}

std::uint64_t cum_ack(const ReceiverState& r) { return r.cum_ack(); }

Datagram snd_ack(const ReceiverState& r) {
  return Datagram{r.cum_ack(), kAckPayload};
}

bool is_cum_ack(const std::set<std::uint64_t>& rcvd, std::uint64_t a) {
  if (a == 0 || rcvd.contains(a)) return false;
  for (std::uint64_t k = 1; k < a; ++k) {
    if (!rcvd.contains(k)) return false;
  }
  return true;
}

}  // namespace rttforge
