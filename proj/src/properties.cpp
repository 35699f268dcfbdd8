#include "rttforge/properties.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "rttforge/errors.hpp"
#include "rttforge/execution.hpp"
#include "rttforge/gbn_endpoints.hpp"
#include "rttforge/karn.hpp"
#include "rttforge/rto.hpp"
#include "rttforge/system.hpp"

namespace rttforge {

void SuiteResult::fail(const std::string& what) {
  ++violations;
  if (failures.size() < 5) failures.push_back(what);
}

std::uint64_t SuiteResult::counter(const std::string& key) const {
  for (const auto& [k, v] : counters) {
    if (k == key) return v;
  }
  return 0;
}

void SuiteResult::bump(const std::string& key, std::uint64_t by) {
  for (auto& [k, v] : counters) {
    if (k == key) {
      v += by;
      return;
    }
  }
  counters.emplace_back(key, by);
}

namespace {

class Timer {
 public:
  explicit Timer(SuiteResult& r) : r_(r), start_(Clock::now()) {}
  ~Timer() {
    r_.seconds =
        std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  using Clock = std::chrono::steady_clock;
  SuiteResult& r_;
  Clock::time_point start_;
};

long long ll(std::uint64_t v) { return static_cast<long long>(v); }

// p/q with 1 <= p < q <= max_den.
Rational unit_fraction(Rng& rng, std::uint64_t max_den) {
  const std::uint64_t q = rng.between(2, max_den);
  return Rational(ll(rng.between(1, q - 1)), ll(q));
}

Rational signed_rational(Rng& rng) {
  Rational q(ll(rng.between(0, 2000)), ll(rng.between(1, 97)));
  return rng.coin() ? -q : q;
}

ExtNat random_ttl(Rng& rng, std::uint64_t max_finite) {
  if (rng.below(3) == 0) return ExtNat::infinity();
  return ExtNat::finite(rng.between(1, max_finite));
}

TbfParams random_params(Rng& rng) {
  TbfParams p;
  p.b_cap = rng.between(1, 8);
  p.rat = rng.between(1, p.b_cap);
  p.d_cap = rng.between(1, 12);
  p.ttl = random_ttl(rng, 5);
  return p;
}

std::string payload_of(std::uint64_t size) { return std::string(size, 'x'); }

}  // namespace

SuiteResult numerics_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"numerics"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const Rational a = signed_rational(rng);
    const Rational b = signed_rational(rng);
    if ((a + b) - b != a) r.fail("(a+b)-b != a for " + a.to_string());
    const Rational prod = a * b;
    if (gcd(prod.numerator(), prod.denominator()) != 1 &&
        !prod.is_zero()) {
      r.fail("unreduced product " + prod.to_string());
    }
    const Rational q = unit_fraction(rng, 20) * Rational(ll(rng.between(1, 3)));
    const std::uint64_t m = rng.below(33);
    const std::uint64_t n = rng.below(33);
    if (qpow(q, m + n) != qpow(q, m) * qpow(q, n)) {
      r.fail("qpow law for " + q.to_string());
    }
    const ExtNat x = random_ttl(rng, 100), y = random_ttl(rng, 100),
                 z = random_ttl(rng, 100);
    if (ext_add(ext_add(x, y), z) != ext_add(x, ext_add(y, z)) ||
        ext_add(x, y) != ext_add(y, x)) {
      r.fail("ext_add algebra");
    }
    if (ext_add(x, ExtNat::infinity()) != ExtNat::infinity()) {
      r.fail("infinity not absorbing");
    }
  }
  return r;
}

SuiteResult rto_algebra_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"rto-algebra"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    // Closed form against repeated application.
    const Rational beta = unit_fraction(rng, 16);
    const Rational delta(ll(rng.between(1, 400)), ll(rng.between(1, 9)));
    const Rational prev(ll(rng.between(0, 400)), ll(rng.between(1, 9)));
    const std::uint64_t n = rng.below(65);
    Rational x = prev;
    for (std::uint64_t k = 0; k <= n; ++k) x = rttvar_step_bound(x, delta, beta);
    if (x != rttvar_closed_bound(prev, delta, beta, n)) {
      r.fail("closed rttvar bound differs from recursion at n=" +
             std::to_string(n));
    }

    // Homogeneity and the rto - srtt gap.
    RtoParams p{unit_fraction(rng, 16), unit_fraction(rng, 16),
                Rational(ll(rng.between(1, 50)), 100)};
    const Rational scale(ll(rng.between(1, 20)), ll(rng.between(1, 20)));
    std::vector<Rational> samples, scaled;
    const std::size_t len = rng.between(1, 30);
    for (std::size_t i = 0; i < len; ++i) {
      samples.emplace_back(ll(rng.between(1, 300)), ll(rng.between(1, 6)));
      scaled.push_back(samples.back() * scale);
    }
    const auto run = rto_run(samples, p);
    const auto run_scaled =
        rto_run(scaled, RtoParams{p.alpha, p.beta, p.G * scale});
    for (std::size_t i = 0; i < len; ++i) {
      if (run_scaled[i].srtt != run[i].srtt * scale ||
          run_scaled[i].rttvar != run[i].rttvar * scale ||
          run_scaled[i].rto != run[i].rto * scale) {
        r.fail("scaling does not commute at step " + std::to_string(i));
        break;
      }
      if (run[i].rto - run[i].srtt < p.G ||
          run[i].rto != run[i].srtt + max(p.G, run[i].rttvar * 4)) {
        r.fail("rto - srtt gap at step " + std::to_string(i));
        break;
      }
    }
  }
  return r;
}

SuiteResult steady_bound_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"steady-state-bounds"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    RtoParams p{unit_fraction(rng, 16), unit_fraction(rng, 16),
                Rational(ll(rng.between(1, 100)), 100)};
    const Rational c(ll(rng.between(1, 200)), ll(rng.between(1, 8)));
    const SteadyBand band{c, c * Rational(ll(rng.below(16)), 16)};
    const Rational srtt_prev =
        (band.c + band.r) * Rational(ll(rng.between(1, 32)), 16);
    const Rational rttvar_prev =
        (band.c + band.r) * Rational(ll(rng.below(17)), 16);
    const std::uint64_t n = rng.below(51);
    const auto samples =
        gen_uniform_steady(band, n + 1, rng.between(1, 20), rng.next());

    RtoState s{1, srtt_prev, rttvar_prev,
               srtt_prev + max(p.G, rttvar_prev * 4)};
    Rational observed_dev(0);
    std::vector<Rational> devs;
    for (std::uint64_t m = 0; m <= n; ++m) {
      const Rational dev = abs(s.srtt - samples[m]);
      devs.push_back(dev);
      observed_dev = max(observed_dev, dev);
      s = rto_step(s, samples[m], p);
      const SrttBounds b = srtt_bounds(srtt_prev, band, p.alpha, m);
      if (s.srtt < b.L || s.srtt > b.H) {
        r.fail("srtt outside [L,H] at m=" + std::to_string(m) + " trial " +
               std::to_string(t));
        break;
      }
    }
    const Rational delta = observed_dev.sign() > 0 ? observed_dev : Rational(1);
    if (s.rttvar > rttvar_closed_bound(rttvar_prev, delta, p.beta, n)) {
      r.fail("rttvar above closed bound, trial " + std::to_string(t));
    }
    const RtoEnvelope env =
        rto_envelope(srtt_prev, rttvar_prev, s.rttvar, delta, band, p, n);
    if (s.rto < env.lower || s.rto > env.upper) {
      r.fail("rto outside envelope, trial " + std::to_string(t));
    }
    // The closed-form deviation bound, when it covers every deviation.
    const Rational dx = delta_expr(srtt_prev, band, p.alpha, n);
    if (dx.sign() > 0 &&
        std::all_of(devs.begin(), devs.end(),
                    [&](const Rational& d) { return d <= dx; })) {
      r.bump("delta-expr-applicable");
      if (s.rttvar > rttvar_closed_bound(rttvar_prev, dx, p.beta, n)) {
        r.fail("rttvar above bound with delta_expr, trial " + std::to_string(t));
      }
    }
  }
  return r;
}

SuiteResult limit_delta_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"limit-delta"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const Rational alpha = unit_fraction(rng, 64);
    const std::uint64_t y = rng.between(1, 64);
    const Rational eps(ll(rng.between(1, 2 * y)), ll(y));
    const std::uint64_t d = limit_delta(alpha, eps);
    if (!(qpow(alpha, d + 1) < eps)) {
      r.fail("alpha=" + alpha.to_string() + " eps=" + eps.to_string());
    }
  }
  return r;
}

namespace {

ExecConfig mixed_config(Rng& rng, std::uint64_t seed) {
  static const Rational kLoss[] = {Rational(0), Rational(1, 10), Rational(1, 5),
                                   Rational(1, 3)};
  ExecConfig cfg;
  cfg.n_packets = rng.between(1, 12);
  cfg.loss_rate = kLoss[rng.below(4)];
  cfg.reorder_window = rng.below(4);
  cfg.allow_ack_loss = rng.coin();
  cfg.fifo_acks = false;
  cfg.max_retransmissions = rng.below(4);
  cfg.allow_duplication = rng.below(4) == 0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

SuiteResult karn_mixed_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"karn-mixed"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const Execution e = gen_execution(mixed_config(rng, rng.next()));
    if (!validate(e).ok()) {
      r.fail("generated execution invalid, trial " + std::to_string(t));
      continue;
    }
    KarnState s = karn_init();
    std::uint64_t sender_events = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i].is_sender_event()) continue;
      const std::uint64_t high = s.high;
      karn_apply(s, e[i], i);
      ++sender_events;
      if (auto v = karn_invariant_violation(s)) {
        r.fail(*v + ", trial " + std::to_string(t));
        break;
      }
      if (s.high < high) r.fail("high decreased");
    }
    if (s.tau != sender_events + 1) r.fail("tau != 1 + sender events");
    r.bump("samples", s.emitted.size());
    const ObsReport obs = check_sample_upper_bound(e);
    if (!obs.ok) r.fail(obs.violations.front() + ", trial " + std::to_string(t));
  }
  return r;
}

SuiteResult karn_fifo_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"karn-fifo"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    ExecConfig cfg = mixed_config(rng, rng.next());
    cfg.fifo_acks = true;
    const Execution e = gen_execution(cfg);
    if (!validate(e).ok() || !is_fifo_ack(e)) {
      r.fail("generated execution not FIFO-ack, trial " + std::to_string(t));
      continue;
    }
    const ObsReport obs = check_sample_exact(e);
    r.bump("samples", obs.samples_checked);
    if (!obs.ok) r.fail(obs.violations.front() + ", trial " + std::to_string(t));
  }
  return r;
}

SuiteResult gbn_endpoint_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"gbn-endpoints"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const std::size_t len = rng.below(201);
    SenderState s = SenderState::initial(rng.between(1, 10));
    for (std::size_t k = 0; k < len; ++k) {
      const SenderState before = s;
      const std::uint64_t pick = rng.below(3);
      if (pick == 0 && s.cur < s.hiA + s.N) {
        s = adv_cur(s, "p").first;
      } else if (pick == 1 && s.cur == s.hiA + s.N) {
        s = timeout(s);
      } else {
        s = rcv_ack(s, rng.between(1, s.hiP_or_zero() + 3));
      }
      if (auto v = sender_invariant_violation(s)) {
        r.fail(*v + ", trial " + std::to_string(t));
        break;
      }
      if (s.hiA < before.hiA || s.hiP_or_zero() < before.hiP_or_zero()) {
        r.fail("sender counters decreased, trial " + std::to_string(t));
        break;
      }
    }

    ReceiverState rcv(rng.coin());
    std::uint64_t counter = 0;  // single-integer model of the default mode
    for (std::size_t k = 0; k < len; ++k) {
      const ReceiverState before = rcv;
      if (rng.below(4) == 0) {
        if (snd_ack(rcv).id != rcv.cum_ack() || !(before == rcv)) {
          r.fail("snd_ack changed state");
        }
      } else {
        const std::uint64_t i = rng.between(1, rcv.max_received() + 3);
        rcv = rcv_pkt(rcv, i);
        if (i == counter + 1) ++counter;
      }
      if (!before.subset_of(rcv)) {
        r.fail("rcvd shrank, trial " + std::to_string(t));
        break;
      }
      if (!rcv.buffer_ooo() &&
          (rcv.cum_ack() != counter + 1 || rcv.max_received() != counter)) {
        r.fail("default receiver disagrees with counter model");
        break;
      }
    }
  }
  return r;
}

TbfTrial gen_tbf_trial(Rng& rng, std::size_t max_ops) {
  const TbfParams p = random_params(rng);
  TbfTrial trial{TbfState::empty(p, rng.below(p.b_cap + 1)), {}};
  TbfState t = trial.start;
  std::uint64_t next_id = 1;
  trial.ops.push_back(TbfOp{TbfOpKind::Tick, 0, {}});
  t = tick(t);
  const std::size_t len = rng.below(max_ops + 1);
  for (std::size_t k = 0; k < len; ++k) {
    TbfOp op;
    std::vector<std::size_t> forwardable;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      if (t.data[i].dg.size() <= t.bucket) forwardable.push_back(i);
    }
    switch (rng.below(5)) {
      case 0: op.kind = TbfOpKind::Tick; break;
      case 1: op.kind = TbfOpKind::Decay; break;
      case 2:
        if (!t.data.empty()) {
          op.kind = TbfOpKind::Drop;
          op.index = rng.below(t.data.size());
          break;
        }
        [[fallthrough]];
      case 3:
        if (!forwardable.empty()) {
          op.kind = TbfOpKind::Forward;
          op.index = forwardable[rng.below(forwardable.size())];
          break;
        }
        [[fallthrough]];
      default:
        op.kind = TbfOpKind::Process;
        op.dg = {next_id++, payload_of(rng.between(1, 4))};
        break;
    }
    t = apply(t, op);
    trial.ops.push_back(op);
  }
  return trial;
}

SuiteResult token_bound_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"token-bound"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const TbfTrial trial = gen_tbf_trial(rng, 40);
    r.bump("forwards", std::count_if(trial.ops.begin(), trial.ops.end(),
                                     [](const TbfOp& op) {
                                       return op.kind == TbfOpKind::Forward;
                                     }));
    if (!token_bound_check(trial.start, trial.ops)) {
      r.fail("token bound broken, trial " + std::to_string(t));
    }
  }
  return r;
}

SuiteResult tbf_state_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"tbf-state"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const TbfTrial trial = gen_tbf_trial(rng, 40);
    TbfState s = trial.start;
    for (const TbfOp& op : trial.ops) {
      const TbfState before = s;
      s = apply(s, op);
      if (auto v = tbf_invariant_violation(s)) {
        r.fail(*v + ", trial " + std::to_string(t));
        break;
      }
      if (!(s.params == before.params)) r.fail("params changed");
      if (op.kind == TbfOpKind::Process && s.data.size() == before.data.size() &&
          !(s == before)) {
        r.fail("refused process changed state");
      }
    }
  }
  return r;
}

SerialTrial gen_serial_trial(Rng& rng, std::size_t max_steps) {
  SerialTrial trial;
  TbfParams p1 = random_params(rng), p2 = random_params(rng);
  // Favour short delays so datagrams age out inside a 30-step script.
  if (rng.coin()) p1.ttl = ExtNat::finite(rng.between(1, 3));
  if (rng.coin()) p2.ttl = ExtNat::finite(rng.between(1, 3));
  trial.first = TbfState::empty(p1, rng.below(p1.b_cap + 1));
  trial.second = TbfState::empty(p2, rng.below(p2.b_cap + 1));
  const bool lockstep = p1.ttl.is_finite() && p2.ttl.is_finite();

  TbfState f1 = trial.first, f2 = trial.second;
  std::uint64_t next_id = 1;
  auto emit = [&](SerialOp op) {
    switch (op.kind) {
      case SerialOpKind::Process1: f1 = process(f1, op.dg); break;
      case SerialOpKind::Tick1: {
        std::vector<std::uint64_t> gone;
        f1 = tick(f1, gone);
        if (!gone.empty()) trial.has_age_out = true;
        break;
      }
      case SerialOpKind::Decay1: f1 = decay(f1); trial.has_decay = true; break;
      case SerialOpKind::Drop1: f1 = drop(f1, op.index); break;
      case SerialOpKind::Hop: {
        auto [next, dg] = forward(f1, op.index);
        f1 = std::move(next);
        f2 = process(f2, dg);
        break;
      }
      case SerialOpKind::Tick2: {
        std::vector<std::uint64_t> gone;
        f2 = tick(f2, gone);
        if (!gone.empty()) trial.has_age_out = true;
        break;
      }
      case SerialOpKind::Decay2: f2 = decay(f2); trial.has_decay = true; break;
      case SerialOpKind::Drop2: f2 = drop(f2, op.index); break;
      case SerialOpKind::Forward2: f2 = forward(f2, op.index).first; break;
    }
    trial.script.push_back(std::move(op));
  };
  auto forwardable = [](const TbfState& t) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      if (t.data[i].dg.size() <= t.bucket) out.push_back(i);
    }
    return out;
  };

  const std::size_t len = rng.below(max_steps + 1);  // at most max_steps
  while (trial.script.size() < len) {
    SerialOp op;
    const auto hop = forwardable(f1);
    const auto out = forwardable(f2);
    switch (rng.below(9)) {
      case 0: op.kind = SerialOpKind::Tick1; break;
      case 1: op.kind = SerialOpKind::Decay1; break;
      case 2: op.kind = SerialOpKind::Decay2; break;
      case 3:
        // No room left for the pair: a lone first-stage tick is still safe.
        if (lockstep && trial.script.size() + 2 > len) {
          op.kind = SerialOpKind::Tick1;
          break;
        }
        if (lockstep) emit(SerialOp{SerialOpKind::Tick1, 0, {}});
        op.kind = SerialOpKind::Tick2;
        break;
      case 4:
        if (!f1.data.empty()) {
          op.kind = SerialOpKind::Drop1;
          op.index = rng.below(f1.data.size());
          break;
        }
        [[fallthrough]];
      case 5:
        if (!hop.empty()) {
          op.kind = SerialOpKind::Hop;
          op.index = hop[rng.below(hop.size())];
          break;
        }
        [[fallthrough]];
      case 6:
        if (!out.empty()) {
          op.kind = SerialOpKind::Forward2;
          op.index = out[rng.below(out.size())];
          break;
        }
        [[fallthrough]];
      case 7:
        if (!f2.data.empty()) {
          op.kind = SerialOpKind::Drop2;
          op.index = rng.below(f2.data.size());
          break;
        }
        [[fallthrough]];
      default:
        op.kind = SerialOpKind::Process1;
        op.dg = {next_id++, payload_of(rng.between(1, 3))};
        break;
    }
    emit(std::move(op));
  }
  return trial;
}

SuiteResult composition_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult r{"tbf-composition"};
  Timer timer(r);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t, ++r.trials) {
    const SerialTrial trial = gen_serial_trial(rng, 30);
    if (trial.has_age_out) r.bump("scripts-with-age-out");
    if (trial.has_decay) r.bump("scripts-with-decay");
    try {
      const SerialReport rep =
          simulate_serial(trial.first, trial.second, trial.script);
      if (!rep.equivalent) {
        r.fail(rep.failure.value_or("not equivalent") + " at step " +
               std::to_string(rep.failure_index) + ", trial " +
               std::to_string(t));
      }
    } catch (const ScriptError& e) {
      r.fail(std::string("script rejected: ") + e.what());
    }
  }
  return r;
}

SuiteResult spike_suite(std::size_t frozen_warmup) {
  SuiteResult r{"spike-scenario"};
  Timer timer(r);
  const SteadyBand band{Rational(135, 2), Rational(15, 2)};
  const RtoParams p{Rational(1, 8), Rational(1, 4), Rational(1, 100)};
  const auto samples = gen_spike_steady(band, 100, 1000);
  const auto states = rto_run(samples, p);
  const auto timeouts = detect_timeouts(samples, states);
  r.trials = 1;
  if (!steady_check(samples, band)) r.fail("samples not steady");
  const std::size_t w = spike_warmup(samples, timeouts, band);
  if (w > frozen_warmup) {
    r.fail("warm-up grew to " + std::to_string(w));
  }
  std::size_t spikes = 0;
  for (std::size_t i : timeouts) {
    if (i < frozen_warmup) continue;
    if ((i + 1) % 100 != 0) r.fail("timeout off-spike at " + std::to_string(i));
    ++spikes;
  }
  for (std::size_t i = frozen_warmup; i < samples.size(); ++i) {
    if ((i + 1) % 100 == 0 &&
        !std::binary_search(timeouts.begin(), timeouts.end(), i)) {
      r.fail("spike without timeout at " + std::to_string(i));
    }
  }
  r.bump("spikes", spikes);
  if (spikes < 9) r.fail("fewer than 9 spikes");
  return r;
}

SuiteResult best_case_suite() {
  SuiteResult r{"best-case"};
  Timer timer(r);
  for (std::uint64_t N : {1, 2, 5, 10}) {
    for (std::uint64_t w : {1, 5}) {
      ++r.trials;
      const Scenario sc = build_best_case(N, w);
      const Trace t = replay(sc.initial, sc.script);
      const auto& s = t.final_state.sender;
      const std::string tag =
          "N=" + std::to_string(N) + " w=" + std::to_string(w);
      if (efficiency(t) != Rational(1)) r.fail("efficiency below 1, " + tag);
      if (s.hiA != w * N + 1 || s.hiP != w * N || s.cur != w * N + 1) {
        r.fail("final sender state, " + tag);
      }
      if (t.final_state.receiver.cum_ack() != w * N + 1) {
        r.fail("receiver state, " + tag);
      }
    }
  }
  return r;
}

namespace {

struct OvertxCase {
  std::uint64_t N, R, rat, d_cap;
};
constexpr OvertxCase kOvertxGrid[] = {
    {200, 10, 1, 100}, {500, 20, 4, 180}, {1000, 50, 10, 450}};

std::string tag(const OvertxCase& c) {
  return "(" + std::to_string(c.N) + "," + std::to_string(c.R) + "," +
         std::to_string(c.rat) + "," + std::to_string(c.d_cap) + ")";
}

}  // namespace

SuiteResult overtx_suite() {
  SuiteResult r{"over-transmission"};
  Timer timer(r);
  for (const OvertxCase& c : kOvertxGrid) {
    ++r.trials;
    const OvertxScenario sc = build_overtx(c.N, c.R, c.rat, c.d_cap);
    const Trace t = replay(sc.initial, sc.script);
    const Rational predicted =
        predicted_overtx_eff(Rational(ll(c.R)), Rational(ll(c.rat)),
                             Rational(ll(c.d_cap)), Rational(ll(c.N)));
    const Rational got = efficiency(t);
    if (got != predicted) {
      r.fail(tag(c) + ": simulated " + got.to_string() + " vs predicted " +
             predicted.to_string());
    }
  }
  return r;
}

SuiteResult warmup_suite() {
  SuiteResult r{"warm-up"};
  Timer timer(r);
  for (const OvertxCase& c : kOvertxGrid) {
    ++r.trials;
    const OvertxScenario sc = build_overtx(c.N, c.R, c.rat, c.d_cap);
    const std::uint64_t w = sc.warmup;
    if (w != steps_to_fill(c.R, c.rat, c.d_cap) || sc.burst_ends.size() != w) {
      r.fail(tag(c) + ": warm-up bookkeeping");
      continue;
    }
    const SimplifiedState start = simplify(sc.initial);
    SystemState sys = sc.initial;
    std::size_t pos = 0;
    for (std::uint64_t k = 1; k <= w; ++k) {
      for (; pos < sc.burst_ends[k - 1]; ++pos) {
        sys = sys_step(sys, sc.script[pos]).first;
      }
      if (simplify(sys) != many_steps_simplified(start, c.R, c.rat, k)) {
        r.fail(tag(c) + ": reduced model diverges after burst " +
               std::to_string(k));
        break;
      }
    }
    const SimplifiedState now = simplify(sys);
    if (now.chan != top_down(start.cur + c.R * w - 1, (c.R - c.rat) * w)) {
      r.fail(tag(c) + ": queue is not the descending run");
    }
    if (now.ack != start.ack + c.rat * w) r.fail(tag(c) + ": ack growth");
    if (now.cur != start.cur + c.R * w) r.fail(tag(c) + ": cur growth");
  }
  return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, std::size_t trials) {
  auto n = [&](std::size_t def) { return trials == 0 ? def : trials; };
  std::vector<SuiteResult> out;
  out.push_back(numerics_suite(seed, n(2000)));
  out.push_back(rto_algebra_suite(seed + 1, n(1000)));
  out.push_back(steady_bound_suite(seed + 2, n(10000)));
  out.push_back(limit_delta_suite(seed + 3, n(100)));
  out.push_back(karn_mixed_suite(seed + 4, n(1000)));
  out.push_back(karn_fifo_suite(seed + 5, n(1000)));
  out.push_back(gbn_endpoint_suite(seed + 6, n(10000)));
  out.push_back(token_bound_suite(seed + 7, n(10000)));
  out.push_back(tbf_state_suite(seed + 8, n(2000)));
  out.push_back(composition_suite(seed + 9, n(1000)));
  out.push_back(best_case_suite());
  out.push_back(overtx_suite());
  out.push_back(warmup_suite());
  return out;
}

}  // namespace rttforge
