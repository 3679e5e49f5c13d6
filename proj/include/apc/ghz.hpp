#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "apc/physics.hpp"

// Post-stage model for star-topology GHZ distribution: fusion of bipartite
// arms into an N-party GHZ state plus stabilizer-check purification passes.

namespace apc {

struct GhzState {
  int n_parties = 2;
  double fidelity = 1.0;
};

struct GhzPassParams {
  double f_anc = 1.0;       // ancilla GHZ fidelity used by the checks
  double p_meas_ghz = 0.0;  // per-check readout error
  int passes = 1;
};

struct GhzPassResult {
  GhzState state;
  double p_succ = 1.0;
  int ancilla_cost = 0;  // ancilla GHZ states consumed this pass
  bool feasible = true;
};

struct GhzMultiPassResult {
  GhzState state;
  double p_succ = 1.0;    // product over passes
  int ancilla_cost = 0;   // total ancillas
  double pass_time = 0.0; // total check latency across passes
  bool feasible = true;
};

/// Fuse Werner arms of fidelities F_i into an N-party GHZ diagonal state:
///   F = (1 + (2^N - 1) prod_i w_i) / 2^N,  N = number of arms.
/// Requires at least two arms and every F_i in [0,1].
inline GhzState ghz_from_arms(std::span<const double> arm_fidelities) {
  if (arm_fidelities.size() < 2) {
    throw std::domain_error("ghz_from_arms: need at least two arms");
  }
  double w = 1.0;
  for (double f : arm_fidelities) w *= werner_from_fidelity(f);
  const int n = static_cast<int>(arm_fidelities.size());
  const double dim = std::pow(2.0, n);
  return {n, clamp01((1.0 + (dim - 1.0) * w) / dim)};
}

/// One stabilizer-check purification pass with m = N checks. The error
/// detected per check is eps = (1 - f_anc) + p_meas_ghz (clipped to [0,1]);
/// a good state passes all checks with (1-eps)^m while any of the 2^m - 1
/// error syndromes of a bad state slips through with probability
/// (1 - (1-eps)^m)/(2^m - 1).
inline GhzPassResult ghz_pass(const GhzState& state, const GhzPassParams& params) {
  if (state.n_parties < 2) {
    throw std::domain_error("ghz_pass: n_parties < 2");
  }
  if (!(state.fidelity >= 0.0 && state.fidelity <= 1.0)) {
    throw std::domain_error("ghz_pass: fidelity outside [0,1]");
  }
  if (!(params.f_anc >= 0.0 && params.f_anc <= 1.0) ||
      !(params.p_meas_ghz >= 0.0 && params.p_meas_ghz <= 1.0)) {
    throw std::domain_error("ghz_pass: parameter outside [0,1]");
  }
  const double eps = clamp01((1.0 - params.f_anc) + params.p_meas_ghz);
  const int m = state.n_parties;
  const double keep_good = std::pow(1.0 - eps, m);
  const double syndromes = std::pow(2.0, m) - 1.0;
  const double keep_bad = (1.0 - keep_good) / syndromes;
  const double f = state.fidelity;
  const double p_succ = f * keep_good + (1.0 - f) * keep_bad;
  GhzPassResult out;
  out.ancilla_cost = m;
  if (p_succ <= 0.0 || keep_good <= 0.0) {
    out.state = state;
    out.p_succ = 0.0;
    out.feasible = false;
    return out;
  }
  out.state = {m, clamp01(f * keep_good / p_succ)};
  out.p_succ = p_succ;
  return out;
}

/// Chain `params.passes` passes. Each pass costs m checks, every check
/// taking `per_check_time` plus one classical round trip to the farthest
/// party (`classical_rtt`).
inline GhzMultiPassResult ghz_multi_pass(const GhzState& state, const GhzPassParams& params,
                                         double per_check_time = 0.0,
                                         double classical_rtt = 0.0) {
  if (params.passes < 0) {
    throw std::domain_error("ghz_multi_pass: negative pass count");
  }
  if (per_check_time < 0.0 || classical_rtt < 0.0) {
    throw std::domain_error("ghz_multi_pass: negative duration");
  }
  GhzMultiPassResult out{state, 1.0, 0, 0.0, true};
  for (int i = 0; i < params.passes; ++i) {
    const GhzPassResult pass = ghz_pass(out.state, params);
    out.ancilla_cost += pass.ancilla_cost;
    out.pass_time += pass.ancilla_cost * (per_check_time + classical_rtt);
    out.p_succ *= pass.p_succ;
    out.state = pass.state;
    if (!pass.feasible) {
      out.feasible = false;
      return out;
    }
  }
  return out;
}

}  // namespace apc
