#include "rttforge/tbf.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rttforge/csv.hpp"
#include "rttforge/errors.hpp"

namespace rttforge {

void TbfParams::validate() const {
  if (b_cap == 0 || d_cap == 0 || rat == 0) {
    throw std::invalid_argument("tbf: b_cap, d_cap and rat must be positive");
  }
  if (rat > b_cap) throw std::invalid_argument("tbf: rat exceeds b_cap");
  if (ttl == ExtNat::finite(0)) throw std::invalid_argument("tbf: ttl is zero");
}

TbfState TbfState::empty(const TbfParams& params, std::uint64_t bucket) {
  params.validate();
  if (bucket > params.b_cap) throw std::invalid_argument("tbf: bucket > b_cap");
  return TbfState{params, bucket, {}};
}

std::uint64_t TbfState::sz() const {
  std::uint64_t total = 0;
  for (const auto& td : data) total += td.dg.size();
  return total;
}

std::vector<std::uint64_t> TbfState::ids() const {
  std::vector<std::uint64_t> out;
  out.reserve(data.size());
  for (const auto& td : data) out.push_back(td.dg.id);
  return out;
}

std::optional<std::size_t> TbfState::find(std::uint64_t id) const {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].dg.id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::string> tbf_invariant_violation(const TbfState& t) {
  if (t.bucket > t.params.b_cap) return "bucket exceeds b_cap";
  if (t.sz() > t.params.d_cap) return "queued bytes exceed d_cap";
  return std::nullopt;
}

TbfState tick(const TbfState& t, std::vector<std::uint64_t>& expired) {
  TbfState next{t.params, std::min(t.bucket + t.params.rat, t.params.b_cap), {}};
  next.data.reserve(t.data.size());
  for (const auto& td : t.data) {
    const ExtNat left = ext_pred(td.remaining);
    if (left == ExtNat::finite(0)) {
      expired.push_back(td.dg.id);
    } else {
      next.data.push_back({left, td.dg});
    }
  }
  return next;
}

TbfState tick(const TbfState& t) {
  std::vector<std::uint64_t> ignored;
  return tick(t, ignored);
}

TbfState decay(const TbfState& t) {
  TbfState next = t;
  if (next.bucket > 0) --next.bucket;
  return next;
}

bool fits(const TbfState& t, const Datagram& dg) {
  return t.sz() + dg.size() <= t.params.d_cap;
}

TbfState process(const TbfState& t, const Datagram& dg) {
  if (!fits(t, dg)) return t;
  TbfState next = t;
  next.data.insert(next.data.begin(), TimedDatagram{t.params.ttl, dg});
  return next;
}

TbfState drop(const TbfState& t, std::size_t i) {
  if (i >= t.data.size()) {
    throw std::out_of_range("tbf drop: index " + std::to_string(i) +
                            " out of range");
  }
  TbfState next = t;
  next.data.erase(next.data.begin() + static_cast<std::ptrdiff_t>(i));
  return next;
}

std::pair<TbfState, Datagram> forward(const TbfState& t, std::size_t i) {
  if (i >= t.data.size()) {
    throw std::out_of_range("tbf forward: index " + std::to_string(i) +
                            " out of range");
  }
  const Datagram dg = t.data[i].dg;
  if (dg.size() > t.bucket) {
    throw PreconditionError("tbf", "insufficient-tokens",
                            "need " + std::to_string(dg.size()) + ", have " +
                                std::to_string(t.bucket));
  }
  TbfState next = drop(t, i);
  next.bucket -= dg.size();
  return {std::move(next), dg};
}

std::string to_string(TbfOpKind k) {
  switch (k) {
    case TbfOpKind::Tick: return "tick";
    case TbfOpKind::Decay: return "decay";
    case TbfOpKind::Process: return "process";
    case TbfOpKind::Drop: return "drop";
    case TbfOpKind::Forward: return "forward";
  }
  return "?";
}

TbfState apply(const TbfState& t, const TbfOp& op) {
  switch (op.kind) {
    case TbfOpKind::Tick: return tick(t);
    case TbfOpKind::Decay: return decay(t);
    case TbfOpKind::Process: return process(t, op.dg);
    case TbfOpKind::Drop: return drop(t, op.index);
    case TbfOpKind::Forward: return forward(t, op.index).first;
  }
  return t;
}

bool token_bound_check(const TbfState& start, const std::vector<TbfOp>& ops) {
  TbfState t = start;
  std::uint64_t allowance = t.bucket;
  std::uint64_t spent = 0;
  for (const TbfOp& op : ops) {
    if (op.kind == TbfOpKind::Forward) {
      auto [next, dg] = forward(t, op.index);
      spent += dg.size();
      if (spent > allowance) return false;
      t = std::move(next);
      continue;
    }
    t = apply(t, op);
    if (op.kind == TbfOpKind::Tick) {
      allowance = t.bucket;
      spent = 0;
    }
  }
  return true;
}

TbfState abstract_compose(const TbfState& t1, const TbfState& t2) {
  TbfState out;
  out.params = {t2.params.b_cap, t1.params.d_cap + t2.params.d_cap,
                t2.params.rat, ext_add(t1.params.ttl, t2.params.ttl)};
  out.bucket = t2.bucket;
  out.data.reserve(t1.data.size() + t2.data.size());
  for (const auto& td : t1.data) {
    out.data.push_back({ext_add(td.remaining, t2.params.ttl), td.dg});
  }
  out.data.insert(out.data.end(), t2.data.begin(), t2.data.end());
  return out;
}

bool tbf_equiv(const TbfState& a, const TbfState& b) {
  if (!(a.params == b.params)) return false;
  auto ia = a.ids();
  auto ib = b.ids();
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  return ia == ib;
}

std::string to_string(SerialOpKind k) {
  switch (k) {
    case SerialOpKind::Process1: return "process1";
    case SerialOpKind::Tick1: return "tick1";
    case SerialOpKind::Decay1: return "decay1";
    case SerialOpKind::Drop1: return "drop1";
    case SerialOpKind::Hop: return "hop";
    case SerialOpKind::Tick2: return "tick2";
    case SerialOpKind::Decay2: return "decay2";
    case SerialOpKind::Drop2: return "drop2";
    case SerialOpKind::Forward2: return "forward2";
  }
  return "?";
}

namespace {

class SerialReplayer {
 public:
  SerialReplayer(const TbfState& t1, const TbfState& t2) {
    report_.first = t1;
    report_.second = t2;
    report_.abstract = abstract_compose(t1, t2);
    auto ids = report_.abstract.ids();
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw std::invalid_argument("simulate_serial: duplicate ids in flight");
    }
  }

  SerialReport run(const std::vector<SerialOp>& script) {
    for (std::size_t k = 0; k < script.size() && report_.equivalent; ++k) {
      step(k, script[k]);
      ++report_.steps;
      if (report_.equivalent &&
          !tbf_equiv(abstract_compose(report_.first, report_.second),
                     report_.abstract)) {
        fail(k, "not-equivalent");
      }
    }
    return std::move(report_);
  }

 private:
  TbfState& f1() { return report_.first; }
  TbfState& f2() { return report_.second; }
  TbfState& ab() { return report_.abstract; }

  void fail(std::size_t k, const std::string& why) {
    report_.equivalent = false;
    report_.failure = why;
    report_.failure_index = k;
  }

  void log(std::size_t k, const std::string& what) {
    report_.mirror_log.push_back(std::to_string(k) + ": " + what);
  }

  void mirror_drop(std::size_t k, std::uint64_t id) {
    const auto j = ab().find(id);
    if (!j) {
      fail(k, "abstract-missing-id");
      return;
    }
    ab() = drop(ab(), *j);
    log(k, "drop " + std::to_string(id));
  }

  static void check_index(std::size_t k, const TbfState& t, std::size_t i) {
    if (i >= t.data.size()) throw ScriptError(k, "index out of range");
  }

  static void check_tokens(std::size_t k, const TbfState& t, std::size_t i) {
    check_index(k, t, i);
    if (t.data[i].dg.size() > t.bucket) {
      throw ScriptError(k, "insufficient tokens");
    }
  }

  void step(std::size_t k, const SerialOp& op) {
    switch (op.kind) {
      case SerialOpKind::Process1:
        if (f1().find(op.dg.id) || f2().find(op.dg.id)) {
          throw ScriptError(k, "id " + std::to_string(op.dg.id) +
                                   " reused while in flight");
        }
        if (fits(f1(), op.dg)) {
          f1() = process(f1(), op.dg);
          ab() = process(ab(), op.dg);
          log(k, "process " + std::to_string(op.dg.id));
        } else {
          log(k, "noop");
        }
        break;
      case SerialOpKind::Tick1: {
        std::vector<std::uint64_t> expired;
        f1() = tick(f1(), expired);
        if (expired.empty()) log(k, "noop");
        for (std::uint64_t id : expired) mirror_drop(k, id);
        break;
      }
      case SerialOpKind::Decay1:
        f1() = decay(f1());
        log(k, "noop");
        break;
      case SerialOpKind::Drop1: {
        check_index(k, f1(), op.index);
        const std::uint64_t id = f1().data[op.index].dg.id;
        f1() = drop(f1(), op.index);
        mirror_drop(k, id);
        break;
      }
      case SerialOpKind::Hop: {
        check_tokens(k, f1(), op.index);
        auto [next, dg] = forward(f1(), op.index);
        f1() = std::move(next);
        if (fits(f2(), dg)) {
          f2() = process(f2(), dg);
          log(k, "noop");
        } else {
          mirror_drop(k, dg.id);
        }
        break;
      }
      case SerialOpKind::Tick2: {
        std::vector<std::uint64_t> serial_expired, abstract_expired;
        f2() = tick(f2(), serial_expired);
        ab() = tick(ab(), abstract_expired);
        log(k, "tick");
        for (std::uint64_t id : abstract_expired) {
          if (f1().find(id) || f2().find(id)) {
            fail(k, "abstract-age-out-before-serial");
            return;
          }
        }
        for (std::uint64_t id : serial_expired) {
          if (std::find(abstract_expired.begin(), abstract_expired.end(), id) ==
              abstract_expired.end()) {
            mirror_drop(k, id);
          }
        }
        break;
      }
      case SerialOpKind::Decay2:
        f2() = decay(f2());
        ab() = decay(ab());
        log(k, "decay");
        break;
      case SerialOpKind::Drop2: {
        check_index(k, f2(), op.index);
        const std::uint64_t id = f2().data[op.index].dg.id;
        f2() = drop(f2(), op.index);
        mirror_drop(k, id);
        break;
      }
      case SerialOpKind::Forward2: {
        check_tokens(k, f2(), op.index);
        const std::uint64_t id = f2().data[op.index].dg.id;
        f2() = forward(f2(), op.index).first;
        const auto j = ab().find(id);
        if (!j || ab().data[*j].dg.size() > ab().bucket) {
          fail(k, "abstract-cannot-forward");
          return;
        }
        ab() = forward(ab(), *j).first;
        log(k, "forward " + std::to_string(id));
        break;
      }
    }
  }

  SerialReport report_;
};

std::string join_ids(const std::vector<std::uint64_t>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<std::uint64_t> split_ids(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(std::stoull(item));
  return out;
}

}  // namespace

SerialReport simulate_serial(const TbfState& t1, const TbfState& t2,
                             const std::vector<SerialOp>& script) {
  return SerialReplayer(t1, t2).run(script);
}

std::vector<TbfTraceRow> tbf_trace(const TbfState& start,
                                   const std::vector<TbfOp>& ops) {
  std::vector<TbfTraceRow> rows;
  rows.push_back({0, "init", "", start.bucket, start.sz(), start.ids()});
  TbfState t = start;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const TbfOp& op = ops[k];
    t = apply(t, op);
    std::string arg;
    if (op.kind == TbfOpKind::Drop || op.kind == TbfOpKind::Forward) {
      arg = std::to_string(op.index);
    } else if (op.kind == TbfOpKind::Process) {
      arg = std::to_string(op.dg.id);
    }
    rows.push_back({k + 1, to_string(op.kind), arg, t.bucket, t.sz(), t.ids()});
  }
  return rows;
}

void write_tbf_trace_csv(std::ostream& out, const std::vector<TbfTraceRow>& rows) {
  csv::write_row(out, {"step", "op", "arg", "bucket", "sz_data", "ids"});
  for (const auto& r : rows) {
    csv::write_row(out, {std::to_string(r.step), r.op, r.arg,
                         std::to_string(r.bucket), std::to_string(r.sz_data),
                         join_ids(r.ids)});
  }
}

std::vector<TbfTraceRow> read_tbf_trace_csv(std::istream& in) {
  std::vector<TbfTraceRow> out;
  for (const auto& row : csv::read_with_header(
           in, {"step", "op", "arg", "bucket", "sz_data", "ids"})) {
    out.push_back({static_cast<std::size_t>(std::stoull(row[0])), row[1],
                   row[2], std::stoull(row[3]), std::stoull(row[4]),
                   split_ids(row[5])});
  }
  return out;
}

}  // namespace rttforge
