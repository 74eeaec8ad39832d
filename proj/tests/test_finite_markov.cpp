// Copyright 2026 The hybridcoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference values marked "oracle" come from tests/oracles/derive_expected.py
// (40-digit mpmath, direct linear solves) and are frozen here.

#include <cmath>

#include <gtest/gtest.h>

#include "hybridcoop/finite_markov.hpp"
#include "hybridcoop/rng.hpp"

namespace hybridcoop {
namespace {

constexpr auto kSam = AIBehavior::Samaritan;
constexpr auto kMal = AIBehavior::Malicious;
constexpr auto kIR = AIBehavior::Discriminatory;
constexpr AIBehavior kAll[] = {kSam, kMal, kIR};

const PayoffMatrix kD21 = donation_matrix({2, 1});

PayoffMatrix random_pd(Rng& rng) {
  // T > R > P > S from sorted uniforms on [-5, 5].
  std::array<double, 4> v;
  for (auto& x : v) x = 10 * rng.uniform01() - 5;
  std::sort(v.begin(), v.end());
  return PayoffMatrix::strict(v[2], v[0], v[3], v[1]);
}

TEST(AvgPayoffs, HandExamples) {
  auto p = avg_payoffs(well_mixed(2, 1, 1.0, kSam, kD21), 1);
  EXPECT_DOUBLE_EQ(p.cooperator, 0.0);
  EXPECT_DOUBLE_EQ(p.defector, 2.0);
  for (auto ai : kAll) {
    p = avg_payoffs(well_mixed(2, 0, 1.0, ai, kD21), 1);
    EXPECT_DOUBLE_EQ(p.cooperator, -1.0);
    EXPECT_DOUBLE_EQ(p.defector, 2.0);
  }
}

TEST(AvgPayoffs, AbsentTypeIsAnError) {
  const auto cfg = well_mixed(100, 0, 1.0, kSam, kD21);
  EXPECT_THROW(defector_payoff(cfg, 100), DomainError);
  EXPECT_THROW(cooperator_payoff(cfg, 0), DomainError);
  EXPECT_THROW(avg_payoffs(cfg, 101), DomainError);
  EXPECT_THROW(avg_payoffs(cfg, -1), DomainError);
  EXPECT_NO_THROW(cooperator_payoff(cfg, 100));
}

TEST(Config, Validation) {
  EXPECT_THROW(well_mixed(1, 0, 1.0, kSam, kD21), DomainError);
  EXPECT_THROW(well_mixed(5, -1, 1.0, kSam, kD21), DomainError);
  EXPECT_THROW(well_mixed(5, 0, -0.1, kSam, kD21), DomainError);
}

TEST(Transitions, OracleValue) {
  const auto t = transition_probs(well_mixed(2, 1, 1.0, kSam, kD21), 1);
  EXPECT_NEAR(t.up, 0.039734307340705852, 1e-16);  // oracle
}

TEST(Transitions, BoundaryStructure) {
  for (auto ai : kAll) {
    const auto cfg = well_mixed(8, 3, 0.7, ai, kD21);
    const auto t0 = transition_probs(cfg, 0);
    const auto tn = transition_probs(cfg, 8);
    EXPECT_EQ(t0.down, 0.0);
    EXPECT_EQ(tn.up, 0.0);
    EXPECT_EQ(t0.up > 0.0, ai == kSam) << to_string(ai);
    EXPECT_EQ(tn.down > 0.0, ai == kMal) << to_string(ai);
  }
  // Without AIs both monomorphic states absorb.
  const auto pure = well_mixed(8, 0, 0.7, kSam, kD21);
  EXPECT_EQ(transition_probs(pure, 0).up, 0.0);
  EXPECT_EQ(transition_probs(pure, 8).down, 0.0);
}

TEST(Transitions, SumAtMostOne) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + static_cast<int>(rng.index(40));
    const int M = static_cast<int>(rng.index(20));
    WellMixedConfig cfg{N, M, 3 * rng.uniform01(), 3 * rng.uniform01(), kAll[rng.index(3)], random_pd(rng)};
    for (int k = 0; k <= N; ++k) {
      const auto t = transition_probs(cfg, k);
      ASSERT_GE(t.up, 0.0);
      ASSERT_GE(t.down, 0.0);
      ASSERT_LE(t.up + t.down, 1.0 + 1e-15);
    }
  }
}

// For Discriminatory AIs the AI terms vanish and T+/T- = e^{beta dPi}.
TEST(Transitions, DiscriminatoryRatioIsFermiRatio) {
  const auto cfg = well_mixed(9, 4, 0.8, kIR, kD21);
  for (int k = 1; k < 9; ++k) {
    const auto t = log_transition_probs(cfg, k);
    const auto p = avg_payoffs(cfg, k);
    EXPECT_NEAR(t.up - t.down, 0.8 * (p.cooperator - p.defector), 1e-13);
  }
}

TEST(Transitions, StrongSelectionStaysFinite) {
  const auto cfg = well_mixed(100, 50, 10.0, kSam, donation_matrix({10, 1}));
  for (int k = 0; k <= 100; ++k) {
    const auto l = log_transition_probs(cfg, k);
    EXPECT_FALSE(std::isnan(l.up));
    EXPECT_FALSE(std::isnan(l.down));
  }
  EXPECT_TRUE(std::isfinite(fixation_ratio(cfg).log));
}

TEST(FixationRatio, NeutralDriftWithoutAIs) {
  for (int N = 2; N <= 30; ++N) {
    EXPECT_EQ(fixation_ratio(well_mixed(N, 0, 0.0, kSam, kD21)).log, 0.0);
  }
}

TEST(FixationRatio, OracleValues) {
  EXPECT_NEAR(fixation_ratio(well_mixed(10, 4, 0.1, kSam, kD21)).log, 5.5338210042324692, 1e-12);  // oracle
  const auto r = fixation_ratio(well_mixed(3, 2, 0.0, kMal, kD21));
  EXPECT_NEAR(r.log, -1.791759469228055, 1e-13);  // oracle: r = 1/6
  EXPECT_NEAR(r.value, 1.0 / 6.0, 1e-15);
}

TEST(FixationRatio, MatchesClosedFormForSamaritanExample) {
  const auto r = fixation_ratio(well_mixed(10, 4, 0.1, kSam, kD21));
  const double closed = closed_form_G(kSam, 10, 4).value * std::exp(0.1 * closed_form_F(kSam, 10, 4, kD21));
  EXPECT_NEAR(r.value / closed, 1.0, 1e-10);
}

TEST(FixationRatio, DiscriminatoryIsBetaTimesF) {
  for (int M = 0; M <= 6; ++M) {
    const auto cfg = well_mixed(12, M, 0.6, kIR, kD21);
    EXPECT_NEAR(fixation_ratio(cfg).log, 0.6 * closed_form_F(kIR, 12, M, kD21), 1e-11);
  }
}

TEST(ClosedForm, FHandExamples) {
  EXPECT_DOUBLE_EQ(closed_form_F(kIR, 2, 0, kD21), -3.0);
  for (auto ai : kAll) EXPECT_EQ(closed_form_F(ai, 7, 3, PayoffMatrix(2, 2, 2, 2)), 0.0);
}

TEST(ClosedForm, DiscriminatoryMinusSamaritan) {
  for (int N = 2; N <= 20; ++N) {
    for (int M = 0; M <= 10; ++M) {
      const double diff = closed_form_F(kIR, N, M, kD21) - closed_form_F(kSam, N, M, kD21);
      EXPECT_NEAR(diff, (N - 1.0) * M * (kD21.T - kD21.P) / (N + M - 1.0), 1e-12);
      EXPECT_GE(diff, 0.0);
    }
  }
}

TEST(ClosedForm, GExamples) {
  EXPECT_NEAR(closed_form_G(kSam, 3, 2).value, 6.0, 1e-13);
  EXPECT_NEAR(closed_form_G(kMal, 3, 2).value, 1.0 / 6.0, 1e-15);
  EXPECT_EQ(closed_form_G(kIR, 3, 2).value, 1.0);
  EXPECT_EQ(closed_form_G(kIR, 50, 20).log, 0.0);
  // Without AIs every behaviour reduces to the pure-human chain.
  for (auto ai : kAll) EXPECT_NEAR(closed_form_G(ai, 9, 0).log, 0.0, 1e-14);
}

// Property: log r from the product equals beta F + log G for random
// configurations and all behaviours.
TEST(ClosedForm, MatchesProductOverRandomConfigs) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + static_cast<int>(rng.index(49));
    const int M = static_cast<int>(rng.index(21));
    const double beta = 2 * rng.uniform01();
    const PayoffMatrix m = random_pd(rng);
    for (auto ai : kAll) {
      const auto cfg = well_mixed(N, M, beta, ai, m);
      const double closed = beta * closed_form_F(ai, N, M, m) + closed_form_G(ai, N, M).log;
      ASSERT_NEAR(fixation_ratio(cfg).log, closed, 1e-8) << "N=" << N << " M=" << M << " ai=" << to_string(ai);
    }
  }
}

TEST(FixationProbability, OracleValues) {
  EXPECT_NEAR(fixation_probability(well_mixed(2, 0, 1.0, kIR, kD21), Strategy::Cooperate), 0.047425873177566781,
              1e-16);  // oracle: (1 + e^3)^-1
  EXPECT_NEAR(fixation_probability(well_mixed(6, 0, 0.5, kIR, kD21), Strategy::Cooperate), 0.015433236891231893,
              1e-15);  // oracle
  EXPECT_NEAR(fixation_probability(well_mixed(6, 3, 1.0, kIR, kD21), Strategy::Cooperate), 0.033990202807025807,
              1e-15);  // oracle
}

TEST(FixationProbability, NeutralDrift) {
  for (int N = 2; N <= 50; ++N) {
    for (int M : {0, 3}) {
      const auto cfg = well_mixed(N, M, 0.0, kIR, kD21);
      EXPECT_NEAR(fixation_probability(cfg, Strategy::Cooperate), 1.0 / N, 1e-12);
      EXPECT_NEAR(fixation_probability(cfg, Strategy::Defect), 1.0 / N, 1e-12);
    }
  }
}

// rho_C / rho_D = r for any birth-death chain with absorbing ends.
TEST(FixationProbability, RatioOfInvadersIsR) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int N = 2 + static_cast<int>(rng.index(30));
    const auto cfg = well_mixed(N, static_cast<int>(rng.index(6)), rng.uniform01(), kIR, random_pd(rng));
    const double rc = fixation_probability(cfg, Strategy::Cooperate);
    const double rd = fixation_probability(cfg, Strategy::Defect);
    EXPECT_NEAR(std::log(rc) - std::log(rd), fixation_ratio(cfg).log, 1e-9);
  }
}

TEST(FixationProbability, MatchesBruteForce) {
  EXPECT_NEAR(brute_force_absorption(well_mixed(6, 0, 0.5, kIR, kD21), Strategy::Cooperate),
              fixation_probability(well_mixed(6, 0, 0.5, kIR, kD21), Strategy::Cooperate), 1e-12);
  const auto cfg = well_mixed(6, 3, 1.0, kIR, kD21);
  for (auto s : {Strategy::Cooperate, Strategy::Defect}) {
    EXPECT_NEAR(brute_force_absorption(cfg, s) / fixation_probability(cfg, s), 1.0, 1e-12);
  }
  EXPECT_NEAR(brute_force_absorption(well_mixed(8, 2, 0.0, kIR, kD21), Strategy::Cooperate), 1.0 / 8, 1e-14);
}

TEST(BruteForce, RejectsNonAbsorbingOrLargeChains) {
  EXPECT_THROW(brute_force_absorption(well_mixed(6, 2, 1.0, kSam, kD21), Strategy::Cooperate), DomainError);
  EXPECT_THROW(brute_force_absorption(well_mixed(kBruteForceMaxN + 1, 0, 1.0, kIR, kD21), Strategy::Cooperate),
               DomainError);
}

TEST(CooperationFrequency, Examples) {
  EXPECT_EQ(cooperation_frequency(well_mixed(100, 0, 0.0, kSam, kD21)), 0.5);
  for (int M : {0, 10, 50}) {
    EXPECT_NEAR(cooperation_frequency(well_mixed(100, M, 0.0, kIR, kD21)), 0.5, 1e-15);
  }
}

TEST(CooperationFrequency, WeakSelectionSamaritanBeatsDiscriminatory) {
  for (int M : {10, 50, 90}) {
    for (double b : {2.0, 4.0, 6.0}) {
      const auto m = donation_matrix({b, 1});
      EXPECT_GE(cooperation_frequency(well_mixed(100, M, 0.1, kSam, m)),
                cooperation_frequency(well_mixed(100, M, 0.1, kIR, m)));
    }
  }
}

// At beta = 0 only the role-model factor G matters: the Samaritan frequency
// grows and the Malicious one shrinks as AIs are added.
TEST(CooperationFrequency, MonotoneInMAtZeroBeta) {
  double sam = 0.0, mal = 1.0;
  for (int M = 0; M <= 40; ++M) {
    const double s = cooperation_frequency(well_mixed(20, M, 0.0, kSam, kD21));
    const double d = cooperation_frequency(well_mixed(20, M, 0.0, kMal, kD21));
    EXPECT_GE(s, sam);
    EXPECT_LE(d, mal);
    sam = s;
    mal = d;
  }
  EXPECT_GT(sam, 0.999);
}

TEST(RiskDominance, Examples) {
  EXPECT_FALSE(risk_dominance(well_mixed(10, 3, 0.0, kIR, kD21)));
  for (int M = 1; M <= 5; ++M) EXPECT_TRUE(risk_dominance(well_mixed(10, M, 0.0, kSam, kD21)));
  WellMixedConfig unequal = well_mixed(10, 3, 1.0, kSam, kD21);
  unequal.beta_AI = 2.0;
  EXPECT_THROW(risk_dominance_margin(unequal), DomainError);
}

TEST(RiskDominance, EquivalentToRatioAboveOne) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cfg = well_mixed(2 + static_cast<int>(rng.index(30)), static_cast<int>(rng.index(10)),
                                2 * rng.uniform01(), kAll[rng.index(3)], random_pd(rng));
    const double margin = risk_dominance_margin(cfg);
    if (std::fabs(margin) < 1e-9) continue;
    EXPECT_EQ(risk_dominance(cfg), fixation_ratio(cfg).log > 0.0);
  }
}

TEST(Stationary, TwoAndThreeStates) {
  Eigen::MatrixXd f(2, 2);
  f << 0, 0.1, 0.1, 0;
  auto pi = stationary_distribution(f);
  EXPECT_NEAR(pi(0), 0.5, 1e-14);
  EXPECT_NEAR(pi(1), 0.5, 1e-14);

  // fixation(D-state -> C) twice fixation(C-state -> D): C-state holds 2/3.
  f << 0, 0.05, 0.1, 0;
  pi = stationary_distribution(f);
  EXPECT_NEAR(pi(0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(pi(1), 1.0 / 3.0, 1e-14);

  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(3, 3, 0.2);
  pi = stationary_distribution(g);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(pi(i), 1.0 / 3.0, 1e-14);
}

TEST(Stationary, MatchesCooperationFrequency) {
  const auto cfg = well_mixed(20, 5, 0.5, kIR, kD21);
  Eigen::MatrixXd f(2, 2);
  f << 0, fixation_probability(cfg, Strategy::Defect), fixation_probability(cfg, Strategy::Cooperate), 0;
  EXPECT_NEAR(stationary_distribution(f)(0), cooperation_frequency(cfg), 1e-12);
}

TEST(Stationary, Errors) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(stationary_distribution(f), ReducibleChainError);
  f << 0, 1.5, 0.1, 0;
  EXPECT_THROW(stationary_distribution(f), DomainError);
  EXPECT_THROW(stationary_distribution(Eigen::MatrixXd::Zero(1, 1)), DomainError);
}

}  // namespace
}  // namespace hybridcoop
