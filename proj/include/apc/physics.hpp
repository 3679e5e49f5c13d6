#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

// Closed-form state representations and update maps for bipartite
// purification, depolarizing noise, memory decoherence, and entanglement
// swapping. Everything here is a pure function; all state types are small
// value types.

namespace apc {

inline constexpr double max_mixed_fidelity = 0.25;

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// w = (4F-1)/3. Throws std::domain_error for F outside [0,1].
inline double werner_from_fidelity(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
    throw std::domain_error("fidelity outside [0,1]: " + std::to_string(fidelity));
  }
  return (4.0 * fidelity - 1.0) / 3.0;
}

/// F = (1+3w)/4, inverse of werner_from_fidelity.
inline double fidelity_from_werner(double werner) {
  if (!(werner >= -1.0 / 3.0 - 1e-9 && werner <= 1.0 + 1e-9)) {
    throw std::domain_error("werner parameter outside [-1/3,1]: " + std::to_string(werner));
  }
  return (1.0 + 3.0 * werner) / 4.0;
}

/// Werner state: fidelity F w.r.t. |Phi+> together with w = (4F-1)/3.
struct WernerPair {
  double fidelity = 1.0;
  double werner = 1.0;

  static WernerPair from_fidelity(double f) { return {f, werner_from_fidelity(f)}; }
  static WernerPair from_werner(double w) { return {fidelity_from_werner(w), w}; }
};

/// Bell-diagonal state, coefficients ordered (Phi+, Psi+, Psi-, Phi-).
/// Coefficients are probabilities summing to 1; the Werner special case is
/// a = F, b = c = d = (1-F)/3.
struct BellDiagonal {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  static BellDiagonal werner(double f) {
    const double x = (1.0 - f) / 3.0;
    return {f, x, x, x};
  }

  double fidelity() const { return a; }
  double sum() const { return a + b + c + d; }

  bool valid(double tol = 1e-12) const {
    return a >= -tol && b >= -tol && c >= -tol && d >= -tol &&
           std::abs(sum() - 1.0) <= tol;
  }

  /// Largest spread among the non-target coefficients; zero for Werner form.
  double asymmetry() const {
    const double lo = std::min({b, c, d});
    const double hi = std::max({b, c, d});
    return hi - lo;
  }
};

/// Link-level pair state: scalar Werner tracking or full Bell-diagonal.
using LinkState = std::variant<WernerPair, BellDiagonal>;

inline double fidelity_of(const LinkState& s) {
  return std::visit([](const auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, WernerPair>) {
      return v.fidelity;
    } else {
      return v.fidelity();
    }
  }, s);
}

enum class Protocol { BBPSSW, DEJMPS };

inline const char* to_string(Protocol p) {
  return p == Protocol::BBPSSW ? "bbpssw" : "dejmps";
}

/// Pauli-twirled per-operation error probabilities.
struct DeviceNoise {
  double p1 = 0.0;      // single-qubit gate
  double p2 = 0.0;      // two-qubit gate
  double p_meas = 0.0;  // local measurement bit flip
};

/// Operation counts per recurrence round (or per swap).
struct GateCounts {
  int n_1q = 0;
  int n_2q = 1;
  int n_meas = 2;
};

// ---------------------------------------------------------------------------
// Recurrence maps
// ---------------------------------------------------------------------------

struct WernerRound {
  WernerPair state;
  double p_succ = 1.0;
};

struct BellRound {
  BellDiagonal state;
  double p_succ = 1.0;
};

/// One ideal BBPSSW round on a Werner input:
///   p    = F^2 + (2/3)F(1-F) + (5/9)(1-F)^2
///   F'   = (F^2 + (1-F)^2/9) / p
/// p > 0 for every F in [0,1] (minimum 1/2 at F = 1/4). No device noise is
/// applied here.
inline WernerRound bbpssw_round(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
    throw std::domain_error("bbpssw_round: fidelity outside [0,1]");
  }
  const double f = fidelity;
  const double g = 1.0 - f;
  const double p = f * f + (2.0 / 3.0) * f * g + (5.0 / 9.0) * g * g;
  const double f_next = (f * f + g * g / 9.0) / p;
  return {WernerPair::from_fidelity(clamp01(f_next)), p};
}

/// One ideal DEJMPS round in the fixed (Phi+, Psi+, Psi-, Phi-) basis:
///   p  = (a+d)^2 + (b+c)^2
///   a' = (a^2+d^2)/p   b' = (b^2+c^2)/p   c' = 2bc/p   d' = 2ad/p
/// No coefficient sorting/permutation step is applied between rounds.
inline BellRound dejmps_round(const BellDiagonal& state) {
  if (!state.valid(1e-9)) {
    throw std::domain_error("dejmps_round: invalid Bell-diagonal state");
  }
  const double p = (state.a + state.d) * (state.a + state.d) +
                   (state.b + state.c) * (state.b + state.c);
  if (p <= 0.0) {
    throw std::domain_error("dejmps_round: degenerate state, p_succ = 0");
  }
  BellDiagonal out{
      (state.a * state.a + state.d * state.d) / p,
      (state.b * state.b + state.c * state.c) / p,
      2.0 * state.b * state.c / p,
      2.0 * state.a * state.d / p,
  };
  return {out, p};
}

// ---------------------------------------------------------------------------
// Noise channels
// ---------------------------------------------------------------------------

/// Equivalent depolarizing strength for a Pauli-twirled error probability:
/// lambda = 4^n/(4^n-1) * p, clamped to [0,1].
inline double pauli_to_depolarizing(double p, int n_qubits) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("pauli_to_depolarizing: p outside [0,1]");
  }
  if (n_qubits != 1 && n_qubits != 2) {
    throw std::domain_error("pauli_to_depolarizing: n_qubits must be 1 or 2");
  }
  const double dim4 = n_qubits == 1 ? 4.0 : 16.0;
  return clamp01(dim4 / (dim4 - 1.0) * p);
}

/// Two local readouts fold into one effective two-qubit kick at leading
/// order: lambda_meas ~ (16/15)(p_meas/2). The multiplicity of measurement
/// events is controlled separately through GateCounts::n_meas.
inline double measurement_depolarizing(double p_meas) {
  return pauli_to_depolarizing(p_meas / 2.0, 2);
}

/// r_round = (1-l_1q)^n_1q (1-l_2q)^n_2q (1-l_meas)^n_meas. Empty counts
/// give 1 regardless of noise.
inline double round_reliability(const DeviceNoise& noise, const GateCounts& counts) {
  if (counts.n_1q < 0 || counts.n_2q < 0 || counts.n_meas < 0) {
    throw std::domain_error("round_reliability: negative gate count");
  }
  const double r1 = 1.0 - pauli_to_depolarizing(noise.p1, 1);
  const double r2 = 1.0 - pauli_to_depolarizing(noise.p2, 2);
  const double rm = 1.0 - measurement_depolarizing(noise.p_meas);
  return std::pow(r1, counts.n_1q) * std::pow(r2, counts.n_2q) *
         std::pow(rm, counts.n_meas);
}

inline double round_depolarizing(const DeviceNoise& noise, const GateCounts& counts) {
  return clamp01(1.0 - round_reliability(noise, counts));
}

/// Serial composition of independent depolarizing channels:
/// 1 - (1-a)(1-b). Commutative and associative; 0 is the identity and 1
/// absorbs.
inline double compose_depolarizing(double lambda_a, double lambda_b) {
  if (!(lambda_a >= 0.0 && lambda_a <= 1.0 && lambda_b >= 0.0 && lambda_b <= 1.0)) {
    throw std::domain_error("compose_depolarizing: strength outside [0,1]");
  }
  return clamp01(1.0 - (1.0 - lambda_a) * (1.0 - lambda_b));
}

inline WernerPair apply_depolarizing(const WernerPair& state, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("apply_depolarizing: strength outside [0,1]");
  }
  const double f = clamp01((1.0 - lambda) * state.fidelity + lambda * max_mixed_fidelity);
  return WernerPair::from_fidelity(f);
}

inline BellDiagonal apply_depolarizing(const BellDiagonal& state, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("apply_depolarizing: strength outside [0,1]");
  }
  const double mix = lambda * 0.25;
  const double keep = 1.0 - lambda;
  return {keep * state.a + mix, keep * state.b + mix,
          keep * state.c + mix, keep * state.d + mix};
}

inline LinkState apply_depolarizing(const LinkState& state, double lambda) {
  return std::visit([&](const auto& v) -> LinkState {
    return apply_depolarizing(v, lambda);
  }, state);
}

// ---------------------------------------------------------------------------
// Memory decoherence
// ---------------------------------------------------------------------------

/// Exponential relaxation toward the maximally mixed point:
/// F(t) = 1/4 + (F(0) - 1/4) exp(-t/T2_eff).
inline double decohere(double fidelity, double dwell_time, double t2_eff) {
  if (dwell_time < 0.0) {
    throw std::domain_error("decohere: negative dwell time");
  }
  if (!(t2_eff > 0.0)) {
    throw std::domain_error("decohere: T2_eff must be positive");
  }
  if (dwell_time == 0.0) return fidelity;
  const double decay = std::exp(-dwell_time / t2_eff);
  return max_mixed_fidelity + (fidelity - max_mixed_fidelity) * decay;
}

inline BellDiagonal decohere(const BellDiagonal& state, double dwell_time, double t2_eff) {
  // Same relaxation applied coefficient-wise toward 1/4; preserves the sum
  // and reduces to the fidelity rule on the Phi+ weight.
  return {decohere(state.a, dwell_time, t2_eff), decohere(state.b, dwell_time, t2_eff),
          decohere(state.c, dwell_time, t2_eff), decohere(state.d, dwell_time, t2_eff)};
}

inline LinkState decohere(const LinkState& state, double dwell_time, double t2_eff) {
  return std::visit([&](const auto& v) -> LinkState {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, WernerPair>) {
      return WernerPair::from_fidelity(decohere(v.fidelity, dwell_time, t2_eff));
    } else {
      return decohere(v, dwell_time, t2_eff);
    }
  }, state);
}

// ---------------------------------------------------------------------------
// Multi-round recurrence
// ---------------------------------------------------------------------------

struct MultiRoundResult {
  LinkState state;
  double p_succ = 1.0;   // product of per-round success probabilities
  double c_pairs = 1.0;  // 2^r / p_succ, raw pairs per surviving pair
  int rounds = 0;
  bool feasible = true;
};

/// r recurrence rounds under `protocol`. Per round: ideal update map, then
/// one depolarizing kick of strength compose(lambda_round, lambda_wait),
/// then relaxation over `dwell_per_round` against `t2_eff`. BBPSSW always
/// tracks Werner form (its derivation assumes twirling); DEJMPS tracks the
/// Bell-diagonal coefficients, embedding a Werner input as (F, x, x, x).
/// A round with p_succ = 0 marks the result infeasible instead of throwing.
inline MultiRoundResult multi_round(
    const LinkState& initial, Protocol protocol, int rounds,
    const DeviceNoise& noise = {}, const GateCounts& counts = {},
    double lambda_wait_per_round = 0.0, double dwell_per_round = 0.0,
    double t2_eff = std::numeric_limits<double>::infinity()) {
  if (rounds < 0) {
    throw std::domain_error("multi_round: negative round count");
  }
  MultiRoundResult out{initial, 1.0, 1.0, rounds, true};
  if (rounds == 0) return out;

  const double lambda_round = round_depolarizing(noise, counts);
  const double lambda_tot = compose_depolarizing(lambda_round, clamp01(lambda_wait_per_round));

  LinkState state = initial;
  if (protocol == Protocol::BBPSSW) {
    state = WernerPair::from_fidelity(clamp01(fidelity_of(initial)));
  } else if (std::holds_alternative<WernerPair>(state)) {
    state = BellDiagonal::werner(std::get<WernerPair>(state).fidelity);
  }

  double p_total = 1.0;
  for (int j = 0; j < rounds; ++j) {
    double p_round = 0.0;
    if (protocol == Protocol::BBPSSW) {
      auto r = bbpssw_round(std::get<WernerPair>(state).fidelity);
      p_round = r.p_succ;
      state = r.state;
    } else {
      auto r = dejmps_round(std::get<BellDiagonal>(state));
      p_round = r.p_succ;
      state = r.state;
    }
    if (p_round <= 0.0) {
      out.feasible = false;
      out.state = state;
      out.p_succ = 0.0;
      out.c_pairs = std::numeric_limits<double>::infinity();
      return out;
    }
    if (lambda_tot > 0.0) state = apply_depolarizing(state, lambda_tot);
    if (dwell_per_round > 0.0) state = decohere(state, dwell_per_round, t2_eff);
    p_total *= p_round;
  }

  out.state = state;
  out.p_succ = p_total;
  out.c_pairs = std::pow(2.0, rounds) / p_total;
  return out;
}

// ---------------------------------------------------------------------------
// Entanglement swapping
// ---------------------------------------------------------------------------

/// Werner-level swap rule: w' = w1*w2, i.e. F' = (1 + 3 w1 w2)/4.
inline double swap_compose(double f_left, double f_right) {
  const double w = werner_from_fidelity(f_left) * werner_from_fidelity(f_right);
  return fidelity_from_werner(w);
}

}  // namespace apc
