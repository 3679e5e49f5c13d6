#include "apc/physics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

// Expected values below were computed independently from the closed-form
// expressions (high-precision arithmetic, rounded to 17 significant digits)
// and are frozen here; tests compare the implementation against them rather
// than against its own output.

namespace {

using namespace apc;

TEST(WernerConversion, KnownValues) {
  EXPECT_DOUBLE_EQ(werner_from_fidelity(1.0), 1.0);
  EXPECT_DOUBLE_EQ(werner_from_fidelity(0.25), 0.0);
  EXPECT_NEAR(werner_from_fidelity(0.9), 0.86666666666666667, 1e-15);
  EXPECT_NEAR(fidelity_from_werner(0.86666666666666667), 0.9, 1e-15);
}

TEST(WernerConversion, RoundTripOnGrid) {
  for (int i = 0; i <= 100; ++i) {
    const double f = i / 100.0;
    EXPECT_NEAR(fidelity_from_werner(werner_from_fidelity(f)), f, 1e-12);
  }
}

TEST(WernerConversion, RejectsOutOfRange) {
  EXPECT_THROW(werner_from_fidelity(-0.01), std::domain_error);
  EXPECT_THROW(werner_from_fidelity(1.01), std::domain_error);
  EXPECT_THROW(fidelity_from_werner(1.1), std::domain_error);
  EXPECT_THROW(fidelity_from_werner(-0.5), std::domain_error);
}

TEST(BbpsswRound, FrozenValuesAt085) {
  const WernerRound r = bbpssw_round(0.85);
  EXPECT_NEAR(r.p_succ, 0.82, 1e-12);
  EXPECT_NEAR(r.state.fidelity, 0.88414634146341463, 1e-12);
}

TEST(BbpsswRound, FixedPoints) {
  for (double f : {0.25, 0.5, 1.0}) {
    const WernerRound r = bbpssw_round(f);
    EXPECT_NEAR(r.state.fidelity, f, 1e-12) << "fixed point " << f;
  }
}

TEST(BbpsswRound, GainAboveHalfLossBelow) {
  for (double f = 0.51; f < 0.995; f += 0.01) {
    EXPECT_GT(bbpssw_round(f).state.fidelity, f);
  }
  for (double f = 0.26; f < 0.495; f += 0.01) {
    EXPECT_LT(bbpssw_round(f).state.fidelity, f);
  }
}

TEST(BbpsswRound, SuccessProbabilityPositive) {
  for (int i = 0; i <= 100; ++i) {
    const double f = i / 100.0;
    const WernerRound r = bbpssw_round(f);
    EXPECT_GT(r.p_succ, 0.49);
    EXPECT_LE(r.p_succ, 1.0 + 1e-12);
  }
}

TEST(BbpsswRound, FrozenValueAt06) {
  const WernerRound r = bbpssw_round(0.6);
  EXPECT_NEAR(r.p_succ, 0.60888888888888889, 1e-12);
  EXPECT_NEAR(r.state.fidelity, 0.62043795620437956, 1e-12);
}

TEST(DejmpsRound, PureTargetIsFixed) {
  const BellRound r = dejmps_round(BellDiagonal{1.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(r.p_succ, 1.0);
  EXPECT_DOUBLE_EQ(r.state.a, 1.0);
}

TEST(DejmpsRound, FrozenAsymmetricValues) {
  const BellRound r = dejmps_round(BellDiagonal{0.7, 0.2, 0.05, 0.05});
  EXPECT_NEAR(r.p_succ, 0.625, 1e-12);
  EXPECT_NEAR(r.state.a, 0.788, 1e-12);
  EXPECT_NEAR(r.state.b, 0.068, 1e-12);
  EXPECT_NEAR(r.state.c, 0.032, 1e-12);
  EXPECT_NEAR(r.state.d, 0.112, 1e-12);
}

TEST(DejmpsRound, MatchesBbpsswOnWernerInput) {
  for (double f = 0.0; f <= 1.0; f += 0.05) {
    const WernerRound w = bbpssw_round(f);
    const BellRound b = dejmps_round(BellDiagonal::werner(f));
    EXPECT_NEAR(w.p_succ, b.p_succ, 1e-12) << "f=" << f;
    EXPECT_NEAR(w.state.fidelity, b.state.a, 1e-12) << "f=" << f;
  }
}

TEST(DejmpsRound, PreservesNormalizationOnRandomStates) {
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    const double s = a + b + c + d;
    BellDiagonal state{a / s, b / s, c / s, d / s};
    const BellRound r = dejmps_round(state);
    EXPECT_NEAR(r.state.sum(), 1.0, 1e-12);
    EXPECT_TRUE(r.state.valid(1e-9));
    EXPECT_GT(r.p_succ, 0.0);
    EXPECT_LE(r.p_succ, 1.0 + 1e-12);
  }
}

TEST(DejmpsRound, RejectsInvalidState) {
  EXPECT_THROW(dejmps_round(BellDiagonal{0.5, 0.5, 0.5, 0.5}), std::domain_error);
  EXPECT_THROW(dejmps_round(BellDiagonal{-0.1, 0.5, 0.3, 0.3}), std::domain_error);
}

TEST(PauliToDepolarizing, KnownValues) {
  EXPECT_DOUBLE_EQ(pauli_to_depolarizing(0.0, 1), 0.0);
  EXPECT_DOUBLE_EQ(pauli_to_depolarizing(0.0, 2), 0.0);
  EXPECT_NEAR(pauli_to_depolarizing(0.01, 1), 0.013333333333333333, 1e-15);
  EXPECT_NEAR(pauli_to_depolarizing(0.01, 2), 0.010666666666666667, 1e-15);
  EXPECT_DOUBLE_EQ(pauli_to_depolarizing(1.0, 1), 1.0);  // clamped from 4/3
}

TEST(PauliToDepolarizing, RejectsBadArgs) {
  EXPECT_THROW(pauli_to_depolarizing(-0.1, 1), std::domain_error);
  EXPECT_THROW(pauli_to_depolarizing(0.5, 3), std::domain_error);
}

TEST(RoundReliability, FrozenValue) {
  const DeviceNoise noise{0.0, 0.01, 0.01};
  const GateCounts counts{0, 1, 2};
  EXPECT_NEAR(round_reliability(noise, counts), 0.97880858548148148, 1e-12);
  EXPECT_NEAR(round_depolarizing(noise, counts), 0.021191414518518519, 1e-12);
}

TEST(RoundReliability, NoOperationsMeansNoNoise) {
  EXPECT_DOUBLE_EQ(round_reliability({0.5, 0.5, 0.5}, {0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(round_reliability({0.0, 0.0, 0.0}, {3, 2, 4}), 1.0);
}

TEST(ComposeDepolarizing, IdentityAndAbsorbing) {
  EXPECT_DOUBLE_EQ(compose_depolarizing(0.0, 0.3), 0.3);
  EXPECT_DOUBLE_EQ(compose_depolarizing(0.3, 0.0), 0.3);
  EXPECT_DOUBLE_EQ(compose_depolarizing(1.0, 0.3), 1.0);
}

TEST(ComposeDepolarizing, CommutativeAssociative) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = u(gen), b = u(gen), c = u(gen);
    EXPECT_NEAR(compose_depolarizing(a, b), compose_depolarizing(b, a), 1e-15);
    EXPECT_NEAR(compose_depolarizing(compose_depolarizing(a, b), c),
                compose_depolarizing(a, compose_depolarizing(b, c)), 1e-12);
  }
}

TEST(ApplyDepolarizing, WernerKnownValues) {
  const WernerPair s = WernerPair::from_fidelity(0.9);
  EXPECT_DOUBLE_EQ(apply_depolarizing(s, 0.0).fidelity, 0.9);
  EXPECT_DOUBLE_EQ(apply_depolarizing(s, 1.0).fidelity, 0.25);
  EXPECT_NEAR(apply_depolarizing(s, 0.02).fidelity, 0.98 * 0.9 + 0.02 * 0.25, 1e-15);
}

TEST(ApplyDepolarizing, ContractsFidelityGaps) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double f1 = u(gen), f2 = u(gen), lam = u(gen);
    const double d1 = apply_depolarizing(WernerPair::from_fidelity(f1), lam).fidelity -
                      apply_depolarizing(WernerPair::from_fidelity(f2), lam).fidelity;
    EXPECT_NEAR(std::abs(d1), (1.0 - lam) * std::abs(f1 - f2), 1e-12);
  }
}

TEST(ApplyDepolarizing, BellDiagonalPreservesSum) {
  const BellDiagonal s{0.7, 0.2, 0.05, 0.05};
  const BellDiagonal out = apply_depolarizing(s, 0.3);
  EXPECT_NEAR(out.sum(), 1.0, 1e-12);
  EXPECT_NEAR(out.a, 0.7 * 0.7 + 0.3 * 0.25, 1e-15);
  EXPECT_LT(out.a, s.a);
  EXPECT_GT(out.c, s.c);  // pulled toward 1/4
}

TEST(Decohere, KnownValues) {
  EXPECT_DOUBLE_EQ(decohere(0.85, 0.0, 0.1), 0.85);
  EXPECT_NEAR(decohere(0.85, 0.1, 0.1), 0.47072766470286539, 1e-12);
  EXPECT_NEAR(decohere(0.85, 1e9, 1e-3), 0.25, 1e-12);
}

TEST(Decohere, SemigroupProperty) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> uf(0.0, 1.0);
  std::uniform_real_distribution<double> ut(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = uf(gen), t1 = ut(gen), t2 = ut(gen), t2_eff = 0.05 + ut(gen);
    EXPECT_NEAR(decohere(decohere(f, t1, t2_eff), t2, t2_eff),
                decohere(f, t1 + t2, t2_eff), 1e-12);
  }
}

TEST(Decohere, MonotoneTowardQuarter) {
  double prev = 0.95;
  for (double t = 0.01; t <= 0.2; t += 0.01) {
    const double f = decohere(0.95, t, 0.05);
    EXPECT_LT(f, prev);
    EXPECT_GT(f, 0.25);
    prev = f;
  }
  // states below 1/4 relax upward
  EXPECT_GT(decohere(0.1, 0.1, 0.05), 0.1);
}

TEST(Decohere, InfiniteT2IsIdentity) {
  EXPECT_DOUBLE_EQ(decohere(0.8, 123.0, std::numeric_limits<double>::infinity()), 0.8);
}

TEST(Decohere, RejectsBadArgs) {
  EXPECT_THROW(decohere(0.8, -1.0, 0.1), std::domain_error);
  EXPECT_THROW(decohere(0.8, 1.0, 0.0), std::domain_error);
  EXPECT_THROW(decohere(0.8, 1.0, -0.1), std::domain_error);
}

TEST(Decohere, BellDiagonalMatchesScalarOnFidelity) {
  const BellDiagonal s{0.7, 0.2, 0.05, 0.05};
  const BellDiagonal out = decohere(s, 0.02, 0.1);
  EXPECT_NEAR(out.a, decohere(0.7, 0.02, 0.1), 1e-15);
  EXPECT_NEAR(out.sum(), 1.0, 1e-12);
}

TEST(MultiRound, ZeroRoundsIsIdentity) {
  const MultiRoundResult r = multi_round(WernerPair::from_fidelity(0.77),
                                         Protocol::BBPSSW, 0);
  EXPECT_DOUBLE_EQ(fidelity_of(r.state), 0.77);
  EXPECT_DOUBLE_EQ(r.p_succ, 1.0);
  EXPECT_DOUBLE_EQ(r.c_pairs, 1.0);
  EXPECT_TRUE(r.feasible);
}

TEST(MultiRound, TwoNoiselessRoundsMatchIteratedMap) {
  // Oracle: iterate the closed-form map directly.
  double f = 0.85, p_total = 1.0;
  for (int i = 0; i < 2; ++i) {
    const double g = 1.0 - f;
    const double p = f * f + (2.0 / 3.0) * f * g + (5.0 / 9.0) * g * g;
    f = (f * f + g * g / 9.0) / p;
    p_total *= p;
  }
  const MultiRoundResult r = multi_round(WernerPair::from_fidelity(0.85),
                                         Protocol::BBPSSW, 2);
  EXPECT_NEAR(fidelity_of(r.state), f, 1e-15);
  EXPECT_NEAR(r.p_succ, p_total, 1e-15);
  EXPECT_NEAR(r.c_pairs, 4.0 / p_total, 1e-12);
  // frozen endpoints of the same chain
  EXPECT_NEAR(fidelity_of(r.state), 0.91340335324725381, 1e-12);
  EXPECT_NEAR(r.p_succ, 0.70311653116531165, 1e-12);
  EXPECT_NEAR(r.c_pairs, 5.6889574099055695, 1e-12);
}

TEST(MultiRound, NoisyRoundOrderingMatchesHandComputation) {
  // One round: ideal map, then depolarizing kick, then dwell relaxation.
  const DeviceNoise noise{0.0, 0.01, 0.01};
  const GateCounts counts{0, 1, 2};
  const double dwell = 1e-3, t2 = 0.1;
  const WernerRound ideal = bbpssw_round(0.9);
  const double lam = round_depolarizing(noise, counts);
  const double f_after_kick = (1.0 - lam) * ideal.state.fidelity + lam * 0.25;
  const double f_expected = 0.25 + (f_after_kick - 0.25) * std::exp(-dwell / t2);

  const MultiRoundResult r = multi_round(WernerPair::from_fidelity(0.9), Protocol::BBPSSW,
                                         1, noise, counts, 0.0, dwell, t2);
  EXPECT_NEAR(fidelity_of(r.state), f_expected, 1e-15);
  EXPECT_NEAR(r.p_succ, ideal.p_succ, 1e-15);
}

TEST(MultiRound, WaitDepolarizingComposesWithRoundNoise) {
  const DeviceNoise noise{0.0, 0.01, 0.01};
  const GateCounts counts{0, 1, 2};
  const double lam_wait = 0.05;
  const WernerRound ideal = bbpssw_round(0.9);
  const double lam = compose_depolarizing(round_depolarizing(noise, counts), lam_wait);
  const double f_expected = (1.0 - lam) * ideal.state.fidelity + lam * 0.25;
  const MultiRoundResult r = multi_round(WernerPair::from_fidelity(0.9), Protocol::BBPSSW,
                                         1, noise, counts, lam_wait);
  EXPECT_NEAR(fidelity_of(r.state), f_expected, 1e-15);
}

TEST(MultiRound, CostIsAtLeastTwoPowRounds) {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> u(0.3, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const double f = u(gen);
    const int rounds = trial % 4;
    const MultiRoundResult r = multi_round(WernerPair::from_fidelity(f),
                                           Protocol::BBPSSW, rounds);
    EXPECT_GE(r.c_pairs, std::pow(2.0, rounds) - 1e-9);
  }
  // equality exactly when every round succeeds with certainty
  const MultiRoundResult perfect = multi_round(WernerPair::from_fidelity(1.0),
                                               Protocol::BBPSSW, 3);
  EXPECT_NEAR(perfect.c_pairs, 8.0, 1e-12);
}

TEST(MultiRound, DejmpsTracksBellDiagonal) {
  const MultiRoundResult r = multi_round(BellDiagonal{0.7, 0.2, 0.05, 0.05},
                                         Protocol::DEJMPS, 2);
  ASSERT_TRUE(std::holds_alternative<BellDiagonal>(r.state));
  // Oracle: iterate the coefficient map directly.
  BellDiagonal s{0.7, 0.2, 0.05, 0.05};
  double p_total = 1.0;
  for (int i = 0; i < 2; ++i) {
    const double p = (s.a + s.d) * (s.a + s.d) + (s.b + s.c) * (s.b + s.c);
    s = {(s.a * s.a + s.d * s.d) / p, (s.b * s.b + s.c * s.c) / p,
         2.0 * s.b * s.c / p, 2.0 * s.a * s.d / p};
    p_total *= p;
  }
  EXPECT_NEAR(std::get<BellDiagonal>(r.state).a, s.a, 1e-15);
  EXPECT_NEAR(r.p_succ, p_total, 1e-15);
}

TEST(MultiRound, BbpsswCoercesBellInputToWerner) {
  const BellDiagonal asym{0.7, 0.2, 0.05, 0.05};
  const MultiRoundResult r = multi_round(asym, Protocol::BBPSSW, 1);
  ASSERT_TRUE(std::holds_alternative<WernerPair>(r.state));
  EXPECT_NEAR(fidelity_of(r.state), bbpssw_round(0.7).state.fidelity, 1e-15);
}

TEST(MultiRound, RejectsNegativeRounds) {
  EXPECT_THROW(multi_round(WernerPair::from_fidelity(0.8), Protocol::BBPSSW, -1),
               std::domain_error);
}

TEST(SwapCompose, KnownValues) {
  EXPECT_NEAR(swap_compose(0.9, 0.9), 0.81333333333333333, 1e-12);
  EXPECT_DOUBLE_EQ(swap_compose(1.0, 0.77), 0.77);
  EXPECT_DOUBLE_EQ(swap_compose(0.25, 0.9), 0.25);
}

TEST(SwapCompose, CommutativeAndAssociative) {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(0.25, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double f1 = u(gen), f2 = u(gen), f3 = u(gen);
    EXPECT_DOUBLE_EQ(swap_compose(f1, f2), swap_compose(f2, f1));
    EXPECT_NEAR(swap_compose(swap_compose(f1, f2), f3),
                swap_compose(f1, swap_compose(f2, f3)), 1e-12);
  }
}

TEST(SwapCompose, NeverImprovesAboveQuarter) {
  std::mt19937 gen(19);
  std::uniform_real_distribution<double> u(0.25, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double f1 = u(gen), f2 = u(gen);
    EXPECT_LE(swap_compose(f1, f2), std::min(f1, f2) + 1e-12);
  }
}

}  // namespace
