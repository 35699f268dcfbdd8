#include "rttforge/rto.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "rttforge/csv.hpp"
#include "rttforge/rng.hpp"

namespace rttforge {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void require_alpha(const Rational& alpha) {
  require(alpha.sign() > 0 && alpha <= Rational(1), "alpha must be in (0,1]");
}

}  // namespace

void RtoParams::validate() const {
  require(alpha.sign() > 0 && alpha < Rational(1), "alpha must be in (0,1)");
  require(beta.sign() > 0 && beta < Rational(1), "beta must be in (0,1)");
  require(G.sign() > 0, "G must be positive");
}

void SteadyBand::validate() const {
  require(r.sign() >= 0, "r must be non-negative");
  require((c - r).sign() > 0, "c - r must be positive");
}

RtoState rto_init(const Rational& s1, const RtoParams& p) {
  p.validate();
  require(s1.sign() > 0, "rto_init: sample must be positive");
  return {1, s1, s1 / 2, s1 + max(p.G, s1 * 2)};
}

RtoState rto_step(const RtoState& s, const Rational& sample, const RtoParams& p) {
  p.validate();
  require(sample.sign() > 0, "rto_step: sample must be positive");
  RtoState next;
  next.index = s.index + 1;
  next.rttvar = (Rational(1) - p.beta) * s.rttvar + p.beta * abs(s.srtt - sample);
  next.srtt = (Rational(1) - p.alpha) * s.srtt + p.alpha * sample;
  next.rto = next.srtt + max(p.G, next.rttvar * 4);
  return next;
}

std::vector<RtoState> rto_run(const std::vector<Rational>& samples,
                              const RtoParams& p) {
  require(!samples.empty(), "rto_run: no samples");
  std::vector<RtoState> out;
  out.reserve(samples.size());
  out.push_back(rto_init(samples.front(), p));
  for (std::size_t i = 1; i < samples.size(); ++i) {
    out.push_back(rto_step(out.back(), samples[i], p));
  }
  return out;
}

SrttBounds srtt_bounds(const Rational& srtt_prev, const SteadyBand& band,
                       const Rational& alpha, std::uint64_t n) {
  require_alpha(alpha);
  const Rational decay = qpow(Rational(1) - alpha, n + 1);
  const Rational rest = Rational(1) - decay;
  return {decay * srtt_prev + rest * (band.c - band.r),
          decay * srtt_prev + rest * (band.c + band.r)};
}

Rational rttvar_closed_bound(const Rational& rttvar_prev, const Rational& delta,
                             const Rational& beta, std::uint64_t n) {
  require(beta.sign() > 0 && beta < Rational(1), "beta must be in (0,1)");
  require(delta.sign() > 0, "delta must be positive");
  const Rational decay = qpow(Rational(1) - beta, n + 1);
  return decay * rttvar_prev + (Rational(1) - decay) * delta;
}

Rational rttvar_step_bound(const Rational& x, const Rational& delta,
                           const Rational& beta) {
  return (Rational(1) - beta) * x + beta * delta;
}

Rational delta_expr(const Rational& srtt_prev, const SteadyBand& band,
                    const Rational& alpha, std::uint64_t n) {
  require_alpha(alpha);
  const Rational decay = qpow(Rational(1) - alpha, n + 1);
  return decay * srtt_prev + band.r * 2 - decay * (band.c + band.r);
}

std::uint64_t limit_delta(const Rational& alpha, const Rational& eps) {
  require(alpha.sign() > 0 && alpha < Rational(1), "alpha must be in (0,1)");
  require(eps.sign() > 0, "eps must be positive");
  const BigInt d = alpha.numerator() * eps.denominator();
  if (!d.fits_ulong_p()) throw std::overflow_error("limit_delta: too large");
  return d.get_ui();
}

RtoEnvelope rto_envelope(const Rational& srtt_prev, const Rational& rttvar_prev,
                         const Rational& rttvar_n, const Rational& delta,
                         const SteadyBand& band, const RtoParams& p,
                         std::uint64_t n) {
  const SrttBounds b = srtt_bounds(srtt_prev, band, p.alpha, n);
  const Rational var_bound = rttvar_closed_bound(rttvar_prev, delta, p.beta, n);
  return {b.L + max(p.G, rttvar_n * 4), b.H + max(p.G, var_bound * 4)};
}

std::vector<std::size_t> detect_timeouts(const std::vector<Rational>& samples,
                                         const std::vector<RtoState>& states) {
  require(samples.size() == states.size(),
          "detect_timeouts: samples and states differ in length");
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i] > states[i - 1].rto) out.push_back(i);
  }
  return out;
}

bool steady_check(const std::vector<Rational>& samples, const SteadyBand& band) {
  const Rational lo = band.c - band.r;
  const Rational hi = band.c + band.r;
  for (const Rational& s : samples) {
    if (s < lo || s > hi) return false;
  }
  return true;
}

std::vector<Rational> gen_uniform_steady(const SteadyBand& band, std::uint64_t n,
                                         std::uint64_t grid, std::uint64_t seed) {
  require(grid > 0, "grid must be positive");
  Rng rng(seed);
  std::vector<Rational> out;
  out.reserve(n);
  const Rational step = band.r * 2 / Rational(static_cast<long long>(grid));
  const Rational lo = band.c - band.r;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto k = static_cast<long long>(rng.below(grid + 1));
    out.push_back(lo + step * Rational(k));
  }
  return out;
}

std::vector<Rational> gen_spike_steady(const SteadyBand& band,
                                       std::uint64_t period, std::uint64_t n) {
  require(period >= 2, "period must be at least 2");
  std::vector<Rational> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out.push_back((i + 1) % period == 0 ? band.c + band.r : band.c - band.r);
  }
  return out;
}

std::size_t spike_warmup(const std::vector<Rational>& samples,
                         const std::vector<std::size_t>& timeouts,
                         const SteadyBand& band) {
  std::vector<bool> flagged(samples.size(), false);
  for (std::size_t i : timeouts) flagged.at(i) = true;
  const Rational spike = band.c + band.r;
  std::size_t w = samples.size();
  while (w > 0 && flagged[w - 1] == (samples[w - 1] == spike)) --w;
  return w;
}

void write_rto_csv(std::ostream& out, const std::vector<Rational>& samples,
                   const std::vector<RtoState>& states, bool decimal_column) {
  csv::Row header{"index", "sample", "srtt", "rttvar", "rto", "timeout_flag"};
  if (decimal_column) header.push_back("rto_decimal");
  csv::write_row(out, header);
  const auto timeouts = detect_timeouts(samples, states);
  std::vector<bool> flagged(samples.size(), false);
  for (std::size_t i : timeouts) flagged[i] = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    csv::Row row{std::to_string(i),           samples[i].to_string(),
                 states[i].srtt.to_string(),  states[i].rttvar.to_string(),
                 states[i].rto.to_string(),   flagged[i] ? "1" : "0"};
    if (decimal_column) row.push_back(states[i].rto.to_decimal(12));
    csv::write_row(out, row);
  }
}

std::vector<RtoRow> read_rto_csv(std::istream& in) {
  std::vector<RtoRow> out;
  for (const auto& row : csv::read_with_header(
           in, {"index", "sample", "srtt", "rttvar", "rto", "timeout_flag"})) {
    require(row[5] == "0" || row[5] == "1", "rto csv: bad timeout_flag");
    out.push_back({std::stoull(row[0]), Rational::parse(row[1]),
                   Rational::parse(row[2]), Rational::parse(row[3]),
                   Rational::parse(row[4]), row[5] == "1"});
  }
  return out;
}

std::vector<Rational> read_samples_column(std::istream& in) {
  std::vector<Rational> out;
  for (const auto& row : csv::read_with_header(in, {"index", "sample"})) {
    out.push_back(Rational::parse(row[1]));
  }
  return out;
}

void write_samples_column(std::ostream& out, const std::vector<Rational>& s) {
  csv::write_row(out, {"index", "sample"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    csv::write_row(out, {std::to_string(i), s[i].to_string()});
  }
}

}  // namespace rttforge
