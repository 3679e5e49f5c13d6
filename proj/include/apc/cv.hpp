#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

// Continuous-variable post-stage: two-mode squeezed vacuum through a lossy
// channel with optional noiseless linear amplification (NLA).

namespace apc {

struct CvState {
  double squeezing_r = 0.0;
  double lambda_tms = 0.0;        // tanh(r)
  double transmissivity_eta = 1.0;

  static CvState make(double squeezing_r, double transmissivity_eta) {
    if (squeezing_r < 0.0) {
      throw std::domain_error("CvState: negative squeezing");
    }
    if (!(transmissivity_eta > 0.0 && transmissivity_eta <= 1.0)) {
      throw std::domain_error("CvState: eta outside (0,1]");
    }
    return {squeezing_r, std::tanh(squeezing_r), transmissivity_eta};
  }
};

struct NlaParams {
  double gain_g = 1.0;
  int stages_k = 0;
  std::optional<double> prefactor_a;  // default (1/(1+g))^K

  double effective_prefactor() const {
    if (prefactor_a) return *prefactor_a;
    return std::pow(1.0 / (1.0 + gain_g), stages_k);
  }
};

struct NlaResult {
  CvState state;
  double p_succ = 1.0;
  double c_cv = 1.0;   // attempts per heralded success, 1/p_succ
  double t_cv = 0.0;
};

/// Normalized entanglement proxy F_CV = eta*lambda / (1 - (1-eta)*lambda),
/// in [0,1], strictly increasing in both eta and lambda.
inline double cv_fidelity_proxy(const CvState& state) {
  const double lam = state.lambda_tms;
  const double eta = state.transmissivity_eta;
  if (!(lam >= 0.0 && lam < 1.0)) {
    throw std::domain_error("cv_fidelity_proxy: lambda outside [0,1)");
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error("cv_fidelity_proxy: eta outside (0,1]");
  }
  return eta * lam / (1.0 - (1.0 - eta) * lam);
}

/// K-stage NLA: lambda' = min(g^K lambda, 1 - 1e-9), heralded with
/// p = A (1/g^2)^K where A defaults to (1/(1+g))^K. The reported state
/// carries r_eff = artanh(lambda'). `stage_time` and `herald_rtt` feed the
/// latency estimate t_cv = K*stage_time + herald_rtt (zero-stage NLA is
/// free and certain).
inline NlaResult nla_apply(const CvState& state, const NlaParams& params,
                           double stage_time = 0.0, double herald_rtt = 0.0) {
  if (params.gain_g < 1.0) {
    throw std::domain_error("nla_apply: gain must be >= 1");
  }
  if (params.stages_k < 0) {
    throw std::domain_error("nla_apply: negative stage count");
  }
  if (params.prefactor_a && !(*params.prefactor_a > 0.0 && *params.prefactor_a <= 1.0)) {
    throw std::domain_error("nla_apply: prefactor outside (0,1]");
  }
  if (stage_time < 0.0 || herald_rtt < 0.0) {
    throw std::domain_error("nla_apply: negative duration");
  }
  if (params.stages_k == 0) {
    return {state, 1.0, 1.0, 0.0};
  }
  const double boosted = std::pow(params.gain_g, params.stages_k) * state.lambda_tms;
  const double lam = std::min(boosted, 1.0 - 1e-9);
  const double p = params.effective_prefactor() *
                   std::pow(1.0 / (params.gain_g * params.gain_g), params.stages_k);
  NlaResult out;
  out.state = CvState{std::atanh(lam), lam, state.transmissivity_eta};
  out.p_succ = p;
  out.c_cv = 1.0 / p;
  out.t_cv = params.stages_k * stage_time + herald_rtt;
  return out;
}

}  // namespace apc
