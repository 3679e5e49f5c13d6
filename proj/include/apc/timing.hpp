#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "apc/physics.hpp"

// Latency and generation-time models: fiber attenuation, expected waiting
// time for heralded generation across parallel links, and per-round
// operation latency. All times are seconds, lengths kilometers.

namespace apc {

struct TimingParams {
  double t_1q = 1e-6;
  double t_cnot = 1e-6;
  double t_meas = 1e-6;
  double t_classical_per_round = 0.0;  // overhead on top of the link RTT
  double speed_of_light_fiber = 2.0e8; // m/s
  double attenuation_db_per_km = 0.2;
  double attempt_period = 0.0;         // 0: one link RTT per attempt
  double p_det = 1.0;
};

struct LinkParams {
  double length_km = 1.0;
  double f0 = 1.0;                     // heralded pair fidelity
  std::optional<double> p_gen_override;
  double p_bsm = 1.0;
  double t2_eff = std::numeric_limits<double>::infinity();
  std::optional<BellDiagonal> initial_bell;  // non-Werner heralded state

  LinkState initial_state() const {
    if (initial_bell) return *initial_bell;
    return WernerPair::from_fidelity(f0);
  }
};

/// Round-trip classical signalling time over the link plus fixed overhead.
inline double classical_rtt(const LinkParams& link, const TimingParams& timing) {
  if (!(timing.speed_of_light_fiber > 0.0)) {
    throw std::domain_error("classical_rtt: speed must be positive");
  }
  return 2.0 * link.length_km * 1000.0 / timing.speed_of_light_fiber +
         timing.t_classical_per_round;
}

/// Per-attempt success probability p_gen = p_det * 10^(-alpha L / 10),
/// unless the link pins an override.
inline double gen_success_prob(const LinkParams& link, const TimingParams& timing) {
  if (link.p_gen_override) {
    const double p = *link.p_gen_override;
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::domain_error("gen_success_prob: override outside (0,1]");
    }
    return p;
  }
  if (link.length_km < 0.0) {
    throw std::domain_error("gen_success_prob: negative length");
  }
  if (!(timing.p_det > 0.0 && timing.p_det <= 1.0)) {
    throw std::domain_error("gen_success_prob: p_det outside (0,1]");
  }
  if (timing.attenuation_db_per_km < 0.0) {
    throw std::domain_error("gen_success_prob: negative attenuation");
  }
  return timing.p_det *
         std::pow(10.0, -timing.attenuation_db_per_km * link.length_km / 10.0);
}

inline double attempt_period(const LinkParams& link, const TimingParams& timing) {
  if (timing.attempt_period > 0.0) return timing.attempt_period;
  return 2.0 * link.length_km * 1000.0 / timing.speed_of_light_fiber;
}

inline constexpr double default_series_tol = 1e-12;
inline constexpr long default_series_max_terms = 1000000;

/// E[max_i X_i] for independent geometric attempt counts X_i ~ Geom(p_i):
///   sum_{k>=1} (1 - prod_i (1 - (1-p_i)^(k-1)))
/// evaluated by direct summation, truncated once the summand drops below
/// `tol`. Returns nullopt if the series has not converged after `max_terms`
/// terms. Throws for any p_i <= 0 or > 1.
inline std::optional<double> expected_max_geometric(
    std::span<const double> probs, double tol = default_series_tol,
    long max_terms = default_series_max_terms) {
  if (probs.empty()) {
    throw std::domain_error("expected_max_geometric: no links");
  }
  std::vector<double> q;
  q.reserve(probs.size());
  for (double p : probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::domain_error("expected_max_geometric: p outside (0,1]");
    }
    q.push_back(1.0 - p);
  }
  // powers[i] tracks (1-p_i)^(k-1), advanced by one multiply per term.
  std::vector<double> powers(q.size(), 1.0);
  double total = 0.0;
  for (long k = 1; k <= max_terms; ++k) {
    double prod = 1.0;
    for (double pw : powers) prod *= 1.0 - pw;
    const double term = 1.0 - prod;
    total += term;
    if (term < tol) return total;
    for (std::size_t i = 0; i < powers.size(); ++i) powers[i] *= q[i];
  }
  return std::nullopt;
}

/// E[max_i tau_i X_i] in seconds for per-link attempt periods tau_i. Equal
/// periods reduce to tau * E[max X_i]; otherwise the survival integral is
/// summed over the merged grid of all attempt-completion instants.
inline std::optional<double> expected_max_gen_time(
    std::span<const double> probs, std::span<const double> periods,
    double tol = default_series_tol, long max_terms = default_series_max_terms) {
  if (probs.size() != periods.size() || probs.empty()) {
    throw std::domain_error("expected_max_gen_time: size mismatch");
  }
  for (double tau : periods) {
    if (!(tau > 0.0)) {
      throw std::domain_error("expected_max_gen_time: period must be positive");
    }
  }
  bool uniform = true;
  for (double tau : periods) {
    if (tau != periods[0]) { uniform = false; break; }
  }
  if (uniform) {
    auto e = expected_max_geometric(probs, tol, max_terms);
    if (!e) return std::nullopt;
    return *e * periods[0];
  }

  // P(max > t) = 1 - prod_i (1 - (1-p_i)^floor(t/tau_i)); piecewise constant
  // between completion instants k*tau_i.
  const std::size_t n = probs.size();
  std::vector<double> q(n), next_time(n), pw(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(probs[i] > 0.0 && probs[i] <= 1.0)) {
      throw std::domain_error("expected_max_gen_time: p outside (0,1]");
    }
    q[i] = 1.0 - probs[i];
    next_time[i] = periods[i];
  }
  double total = 0.0;
  double t_prev = 0.0;
  for (long step = 0; step < max_terms; ++step) {
    double t_next = std::numeric_limits<double>::infinity();
    for (double tn : next_time) t_next = std::min(t_next, tn);
    double prod = 1.0;
    for (double p : pw) prod *= 1.0 - p;  // pw holds (1-p_i)^(attempts done)
    const double survive = 1.0 - prod;
    total += survive * (t_next - t_prev);
    if (survive < tol) return total;
    for (std::size_t i = 0; i < n; ++i) {
      if (next_time[i] <= t_next) {
        pw[i] *= q[i];
        next_time[i] += periods[i];
      }
    }
    t_prev = t_next;
  }
  return std::nullopt;
}

/// Latency of one purification (or swap) round: gate and readout time plus
/// one classical round trip over the link.
inline double round_time(const GateCounts& counts, const TimingParams& timing,
                         const LinkParams& link) {
  if (counts.n_1q < 0 || counts.n_2q < 0 || counts.n_meas < 0) {
    throw std::domain_error("round_time: negative gate count");
  }
  if (timing.t_1q < 0.0 || timing.t_cnot < 0.0 || timing.t_meas < 0.0 ||
      timing.t_classical_per_round < 0.0) {
    throw std::domain_error("round_time: negative duration");
  }
  return counts.n_1q * timing.t_1q + counts.n_2q * timing.t_cnot +
         counts.n_meas * timing.t_meas + classical_rtt(link, timing);
}

inline constexpr double default_attempt_cap = 1e6;

/// Expected time to herald one pair on a single link: E[attempts] * period.
/// nullopt when the expected attempt count exceeds `attempt_cap`.
inline std::optional<double> gen_time(const LinkParams& link, const TimingParams& timing,
                                      double attempt_cap = default_attempt_cap) {
  const double p = gen_success_prob(link, timing);
  const double attempts = 1.0 / p;
  if (attempts > attempt_cap) return std::nullopt;
  return attempts * attempt_period(link, timing);
}

}  // namespace apc
