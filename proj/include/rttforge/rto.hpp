#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rttforge/numerics.hpp"

namespace rttforge {

struct RtoParams {
  Rational alpha{1, 8};
  Rational beta{1, 4};
  Rational G{1, 100};
  // Throws std::invalid_argument unless 0 < alpha, beta < 1 and G > 0.
  void validate() const;
};

struct RtoState {
  std::uint64_t index = 1;
  Rational srtt;
  Rational rttvar;
  Rational rto;
  friend bool operator==(const RtoState&, const RtoState&) = default;
};

// Samples are c/r steady when they all lie in [c-r, c+r].
struct SteadyBand {
  Rational c;
  Rational r;
  void validate() const;  // c - r > 0, r >= 0
};

RtoState rto_init(const Rational& s1, const RtoParams& p);
RtoState rto_step(const RtoState& s, const Rational& sample, const RtoParams& p);
std::vector<RtoState> rto_run(const std::vector<Rational>& samples,
                              const RtoParams& p);

struct SrttBounds {
  Rational L;
  Rational H;
};

// Envelope for srtt after n+1 steady samples following srtt_prev.
SrttBounds srtt_bounds(const Rational& srtt_prev, const SteadyBand& band,
                       const Rational& alpha, std::uint64_t n);

// (1-beta)^(n+1) rttvar_prev + (1 - (1-beta)^(n+1)) delta.
Rational rttvar_closed_bound(const Rational& rttvar_prev, const Rational& delta,
                             const Rational& beta, std::uint64_t n);

// x -> (1-beta) x + beta delta.
Rational rttvar_step_bound(const Rational& x, const Rational& delta,
                           const Rational& beta);

Rational delta_expr(const Rational& srtt_prev, const SteadyBand& band,
                    const Rational& alpha, std::uint64_t n);

// For alpha = p/q and eps = x/y in lowest terms, returns p*y: every power of
// alpha above it is below eps.
std::uint64_t limit_delta(const Rational& alpha, const Rational& eps);

// Finite-n envelope on rto after n+1 samples starting from (srtt_prev,
// rttvar_prev), given every deviation |S_j - srtt_{j-1}| in the window is at
// most delta and the samples are steady in band.
struct RtoEnvelope {
  Rational lower;  // L + max(G, 4 rttvar_n), needs the actual rttvar_n
  Rational upper;  // H + max(G, 4 closed bound)
};
RtoEnvelope rto_envelope(const Rational& srtt_prev, const Rational& rttvar_prev,
                         const Rational& rttvar_n, const Rational& delta,
                         const SteadyBand& band, const RtoParams& p,
                         std::uint64_t n);

// Indices i >= 1 with samples[i] > states[i-1].rto.
std::vector<std::size_t> detect_timeouts(const std::vector<Rational>& samples,
                                         const std::vector<RtoState>& states);

bool steady_check(const std::vector<Rational>& samples, const SteadyBand& band);

// n draws from the grid {c - r + 2rk/grid : 0 <= k <= grid}.
std::vector<Rational> gen_uniform_steady(const SteadyBand& band, std::uint64_t n,
                                         std::uint64_t grid, std::uint64_t seed);

// c+r at every period-th sample (1-based), c-r elsewhere.
std::vector<Rational> gen_spike_steady(const SteadyBand& band,
                                       std::uint64_t period, std::uint64_t n);

// Smallest W such that from W on, a sample times out exactly when it is a
// spike.
std::size_t spike_warmup(const std::vector<Rational>& samples,
                         const std::vector<std::size_t>& timeouts,
                         const SteadyBand& band);

// CSV: index, sample, srtt, rttvar, rto, timeout_flag[, rto_decimal].
void write_rto_csv(std::ostream& out, const std::vector<Rational>& samples,
                   const std::vector<RtoState>& states, bool decimal_column);
struct RtoRow {
  std::uint64_t index;
  Rational sample, srtt, rttvar, rto;
  bool timeout;
  friend bool operator==(const RtoRow&, const RtoRow&) = default;
};
std::vector<RtoRow> read_rto_csv(std::istream& in);

// Input CSV: index, sample. Samples may be "p/q", integers, or decimals.
std::vector<Rational> read_samples_column(std::istream& in);
void write_samples_column(std::ostream& out, const std::vector<Rational>& s);

}  // namespace rttforge
