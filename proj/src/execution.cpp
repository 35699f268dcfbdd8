#include "rttforge/execution.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "rttforge/csv.hpp"
#include "rttforge/rng.hpp"

namespace rttforge {

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::SndS: return "snd_s";
    case ActionKind::DlvR: return "dlv_r";
    case ActionKind::SndR: return "snd_r";
    case ActionKind::DlvrR: return "dlvr_r";
  }
  return "?";
}

ActionKind parse_action_kind(const std::string& text) {
  if (text == "snd_s") return ActionKind::SndS;
  if (text == "dlv_r") return ActionKind::DlvR;
  if (text == "snd_r") return ActionKind::SndR;
  if (text == "dlvr_r") return ActionKind::DlvrR;
  throw std::invalid_argument("unknown action '" + text + "'");
}

std::string actor_of(ActionKind kind) {
  switch (kind) {
    case ActionKind::SndS: return "sender";
    case ActionKind::SndR: return "receiver";
    case ActionKind::DlvR:
    case ActionKind::DlvrR: return "channel";
  }
  return "?";
}

std::string to_string(const Action& a) {
  return to_string(a.kind) + "(" + std::to_string(a.id) + ")";
}

ValidityReport validate(const Execution& e) {
  ValidityReport report;
  std::set<std::uint64_t> sent, acks_sent;
  std::uint64_t last_ack = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Action& a = e[i];
    if (a.id == 0) {
      report.violations.push_back({i, "id-positive"});
      continue;
    }
    switch (a.kind) {
      case ActionKind::SndS:
        if (a.id > 1 && !sent.contains(a.id - 1)) {
          report.violations.push_back({i, "sender-order"});
        }
        sent.insert(a.id);
        break;
      case ActionKind::DlvR:
        if (!sent.contains(a.id)) {
          report.violations.push_back({i, "delivery-without-send"});
        }
        break;
      case ActionKind::SndR:
        if (a.id < last_ack) report.violations.push_back({i, "ack-monotone"});
        last_ack = std::max(last_ack, a.id);
        acks_sent.insert(a.id);
        break;
      case ActionKind::DlvrR:
        if (!acks_sent.contains(a.id)) {
          report.violations.push_back({i, "delivery-without-send"});
        }
        break;
    }
  }
  return report;
}

InvalidExecution::InvalidExecution(const ValidityReport& report)
    : std::invalid_argument(
          report.violations.empty()
              ? std::string("invalid execution")
              : "invalid execution: " + report.violations.front().rule +
                    " at index " +
                    std::to_string(report.violations.front().index)),
      report_(report) {}

void require_valid(const Execution& e) {
  auto report = validate(e);
  if (!report.ok()) throw InvalidExecution(report);
}

bool is_fifo_ack(const Execution& e) {
  require_valid(e);
  std::vector<std::uint64_t> sent;
  std::size_t delivered = 0;
  for (const Action& a : e) {
    if (a.kind == ActionKind::SndR) sent.push_back(a.id);
    if (a.kind == ActionKind::DlvrR) {
      if (delivered >= sent.size() || sent[delivered] != a.id) return false;
      ++delivered;
    }
  }
  return true;
}

std::vector<std::uint64_t> tau_clock(const Execution& e) {
  std::vector<std::uint64_t> out;
  out.reserve(e.size());
  std::uint64_t tau = 1;
  for (const Action& a : e) {
    out.push_back(tau);
    if (a.is_sender_event()) ++tau;
  }
  return out;
}

std::optional<std::uint64_t> rtt(const Execution& e, std::uint64_t i) {
  if (i == 0) return std::nullopt;
  std::uint64_t tau = 1;
  std::uint64_t first_send = 0;
  std::uint64_t sends = 0;
  for (const Action& a : e) {
    if (a.kind == ActionKind::SndS && a.id == i) {
      if (sends++ == 0) first_send = tau;
    }
    if (a.kind == ActionKind::DlvrR && a.id > i) {
      if (sends != 1) return std::nullopt;
      return tau - first_send;
    }
    if (a.is_sender_event()) ++tau;
  }
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kSenderWindow = 4;

struct InFlight {
  std::uint64_t id;
  bool duplicated = false;
};

// Picks a position among the first reorder_window+1 queue entries.
std::size_t pick(Rng& rng, std::size_t size, std::uint64_t window) {
  const std::uint64_t span = std::min<std::uint64_t>(size, window + 1);
  return static_cast<std::size_t>(rng.below(span));
}

}  // namespace

Execution gen_execution(const ExecConfig& cfg) {
  if (cfg.loss_rate.sign() < 0 || cfg.loss_rate >= Rational(1)) {
    throw std::invalid_argument("gen_execution: loss_rate must be in [0,1)");
  }
  Execution e;
  if (cfg.n_packets == 0) return e;
  Rng rng(cfg.seed);

  std::uint64_t next = 1;
  std::uint64_t acked = 1;  // highest ACK delivered to the sender
  std::uint64_t expected = 1;
  std::map<std::uint64_t, std::uint64_t> transmissions;
  std::deque<InFlight> data, acks;
  const bool ack_loss = cfg.allow_ack_loss && !cfg.fifo_acks;
  const std::uint64_t ack_window = cfg.fifo_acks ? 0 : cfg.reorder_window;

  enum Choice { kSend, kDeliver, kAck };
  while (true) {
    std::vector<std::uint64_t> resendable;
    for (std::uint64_t id = acked; id < next; ++id) {
      if (transmissions[id] <= cfg.max_retransmissions) resendable.push_back(id);
    }
    const bool can_send_new =
        next <= cfg.n_packets && next < acked + kSenderWindow;
    std::vector<Choice> enabled;
    if (can_send_new || !resendable.empty()) enabled.push_back(kSend);
    if (!data.empty()) enabled.push_back(kDeliver);
    if (!acks.empty()) enabled.push_back(kAck);
    if (enabled.empty()) break;

    switch (enabled[rng.below(enabled.size())]) {
      case kSend: {
        const bool fresh = can_send_new && (resendable.empty() || rng.coin());
        const std::uint64_t id =
            fresh ? next++ : resendable[rng.below(resendable.size())];
        ++transmissions[id];
        e.push_back(Action::snd_s(id));
        if (!rng.chance(cfg.loss_rate)) data.push_back({id});
        break;
      }
      case kDeliver: {
        const std::size_t at = pick(rng, data.size(), cfg.reorder_window);
        InFlight pkt = data[at];
        data.erase(data.begin() + static_cast<std::ptrdiff_t>(at));
        if (cfg.allow_duplication && !pkt.duplicated && rng.below(4) == 0) {
          data.push_back({pkt.id, true});
        }
        e.push_back(Action::dlv_r(pkt.id));
        if (pkt.id == expected) ++expected;
        e.push_back(Action::snd_r(expected));
        if (!(ack_loss && rng.chance(cfg.loss_rate))) acks.push_back({expected});
        break;
      }
      case kAck: {
        const std::size_t at = pick(rng, acks.size(), ack_window);
        InFlight ack = acks[at];
        acks.erase(acks.begin() + static_cast<std::ptrdiff_t>(at));
        if (cfg.allow_duplication && !cfg.fifo_acks && !ack.duplicated &&
            rng.below(4) == 0) {
          acks.push_back({ack.id, true});
        }
        e.push_back(Action::dlvr_r(ack.id));
        acked = std::max(acked, ack.id);
        break;
      }
    }
  }
  return e;
}

void write_execution_csv(std::ostream& out, const Execution& e) {
  csv::write_row(out, {"index", "actor", "action", "id"});
  for (std::size_t i = 0; i < e.size(); ++i) {
    csv::write_row(out, {std::to_string(i), actor_of(e[i].kind),
                         to_string(e[i].kind), std::to_string(e[i].id)});
  }
}

Execution read_execution_csv(std::istream& in) {
  Execution e;
  const auto rows = csv::read_with_header(in, {"index", "actor", "action", "id"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row[0] != std::to_string(i)) {
      throw std::invalid_argument("execution csv: index out of sequence at row " +
                                  std::to_string(i));
    }
    const ActionKind kind = parse_action_kind(row[2]);
    if (row[1] != actor_of(kind)) {
      throw std::invalid_argument("execution csv: actor '" + row[1] +
                                  "' does not match action '" + row[2] + "'");
    }
    if (row[3].empty() ||
        row[3].find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("execution csv: bad id '" + row[3] + "'");
    }
    e.push_back({kind, std::stoull(row[3])});
  }
  return e;
}

Execution example_execution() {
  return {Action::snd_s(1), Action::snd_s(2),  Action::dlv_r(2),
          Action::snd_r(1), Action::dlvr_r(1), Action::dlv_r(1),
          Action::snd_s(3), Action::snd_r(3),  Action::dlv_r(3),
          Action::snd_r(4), Action::dlvr_r(4)};
}

}  // namespace rttforge
