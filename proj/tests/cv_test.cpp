#include "apc/cv.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace {

using namespace apc;

TEST(CvState, FactoryKeepsLambdaConsistent) {
  const CvState s = CvState::make(1.2, 0.85);
  EXPECT_NEAR(s.lambda_tms, 0.83365460701215526, 1e-12);
  EXPECT_NEAR(s.lambda_tms, std::tanh(s.squeezing_r), 1e-15);
  EXPECT_THROW(CvState::make(-0.1, 0.9), std::domain_error);
  EXPECT_THROW(CvState::make(1.0, 0.0), std::domain_error);
  EXPECT_THROW(CvState::make(1.0, 1.1), std::domain_error);
}

TEST(CvFidelityProxy, FrozenValue) {
  EXPECT_NEAR(cv_fidelity_proxy(CvState::make(1.2, 0.85)), 0.80988050851872991, 1e-12);
}

TEST(CvFidelityProxy, LimitsAndRange) {
  EXPECT_DOUBLE_EQ(cv_fidelity_proxy(CvState::make(0.0, 0.85)), 0.0);
  // lossless channel passes lambda through
  const CvState lossless = CvState::make(0.9, 1.0);
  EXPECT_NEAR(cv_fidelity_proxy(lossless), lossless.lambda_tms, 1e-15);
  for (double r = 0.0; r <= 3.0; r += 0.25) {
    for (double eta = 0.1; eta <= 1.0; eta += 0.1) {
      const double f = cv_fidelity_proxy(CvState::make(r, eta));
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(CvFidelityProxy, StrictlyIncreasingInSqueezingAndTransmissivity) {
  for (double r = 0.1; r <= 2.5; r += 0.2) {
    EXPECT_GT(cv_fidelity_proxy(CvState::make(r + 0.05, 0.7)),
              cv_fidelity_proxy(CvState::make(r, 0.7)));
  }
  for (double eta = 0.1; eta <= 0.95; eta += 0.05) {
    EXPECT_GT(cv_fidelity_proxy(CvState::make(1.0, eta + 0.04)),
              cv_fidelity_proxy(CvState::make(1.0, eta)));
  }
}

TEST(NlaApply, ZeroStagesIsFreeIdentity) {
  const CvState s = CvState::make(1.2, 0.85);
  const NlaResult r = nla_apply(s, {1.7, 0, std::nullopt});
  EXPECT_DOUBLE_EQ(r.p_succ, 1.0);
  EXPECT_DOUBLE_EQ(r.c_cv, 1.0);
  EXPECT_DOUBLE_EQ(r.t_cv, 0.0);
  EXPECT_DOUBLE_EQ(r.state.lambda_tms, s.lambda_tms);
}

TEST(NlaApply, FrozenSuccessProbabilities) {
  const CvState s = CvState::make(0.3, 0.9);
  // explicit prefactor A = 1: p = (1/g^2)^K
  const NlaResult unit = nla_apply(s, {1.5, 2, 1.0});
  EXPECT_NEAR(unit.p_succ, 0.19753086419753086, 1e-12);
  // default prefactor (1/(1+g))^K
  const NlaResult dflt = nla_apply(s, {1.5, 2, std::nullopt});
  EXPECT_NEAR(dflt.p_succ, 0.031604938271604938, 1e-12);
  EXPECT_NEAR(dflt.c_cv, 1.0 / dflt.p_succ, 1e-9);
}

TEST(NlaApply, BoostsLambdaByGainPerStage) {
  const CvState s = CvState::make(0.3, 0.9);
  const NlaResult r = nla_apply(s, {1.2, 2, std::nullopt});
  EXPECT_NEAR(r.state.lambda_tms, 1.44 * s.lambda_tms, 1e-12);
  EXPECT_NEAR(r.state.lambda_tms, std::tanh(r.state.squeezing_r), 1e-12);
}

TEST(NlaApply, ClampsLambdaBelowOne) {
  const CvState s = CvState::make(1.2, 0.85);
  const NlaResult r = nla_apply(s, {2.0, 3, std::nullopt});
  EXPECT_NEAR(r.state.lambda_tms, 1.0 - 1e-9, 1e-12);
  EXPECT_TRUE(std::isfinite(r.state.squeezing_r));
}

TEST(NlaApply, NeverLowersTheProxy) {
  for (double g = 1.0; g <= 2.0; g += 0.1) {
    for (int k = 0; k <= 3; ++k) {
      const CvState s = CvState::make(0.8, 0.7);
      const NlaResult r = nla_apply(s, {g, k, std::nullopt});
      EXPECT_GE(cv_fidelity_proxy(r.state) + 1e-12, cv_fidelity_proxy(s))
          << "g=" << g << " k=" << k;
      EXPECT_LE(r.p_succ, 1.0 + 1e-12);
      EXPECT_GT(r.p_succ, 0.0);
    }
  }
}

TEST(NlaApply, LatencyModel) {
  const CvState s = CvState::make(0.5, 0.9);
  const NlaResult r = nla_apply(s, {1.3, 2, std::nullopt}, 3e-6, 1.5e-4);
  EXPECT_NEAR(r.t_cv, 2 * 3e-6 + 1.5e-4, 1e-15);
}

TEST(NlaApply, RejectsBadArgs) {
  const CvState s = CvState::make(0.5, 0.9);
  EXPECT_THROW(nla_apply(s, {0.9, 1, std::nullopt}), std::domain_error);
  EXPECT_THROW(nla_apply(s, {1.5, -1, std::nullopt}), std::domain_error);
  EXPECT_THROW(nla_apply(s, {1.5, 1, 0.0}), std::domain_error);
  EXPECT_THROW(nla_apply(s, {1.5, 1, std::nullopt}, -1.0, 0.0), std::domain_error);
}

}  // namespace
