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

#pragma once

// Exact analytics for a well-mixed population of N imitating humans and M
// fixed-behaviour AIs. The state of the birth-death chain is the number k of
// human cooperators; all products of transition ratios are carried in log
// space so that N = 100 with strong selection stays finite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hybridcoop/game.hpp"

namespace hybridcoop {

struct WellMixedConfig {
  int N = 2;  // humans
  int M = 0;  // AIs
  double beta_H = 1.0;
  double beta_AI = 1.0;
  AIBehavior ai = AIBehavior::Samaritan;
  PayoffMatrix matrix = PayoffMatrix(1.0, -1.0, 2.0, 0.0);

  void validate() const {
    if (N < 2) throw DomainError("well-mixed population needs N >= 2 humans");
    if (M < 0) throw DomainError("number of AIs must be non-negative");
    if (!(beta_H >= 0.0) || !(beta_AI >= 0.0)) throw DomainError("intensity of selection must be >= 0");
  }
};

inline WellMixedConfig well_mixed(int N, int M, double beta, AIBehavior ai, const PayoffMatrix& m) {
  WellMixedConfig cfg{N, M, beta, beta, ai, m};
  cfg.validate();
  return cfg;
}

// A positive quantity carried together with its logarithm; `value` may be
// 0 or inf when it is not representable, `log` is authoritative.
struct LogValue {
  double log;
  double value;

  static LogValue from_log(double l) { return {l, std::exp(l)}; }
};

struct AvgPayoffs {
  double cooperator;  // Pi_C(k)
  double defector;    // Pi_D(k)
};

struct Transitions {
  double up;    // T+(k): k -> k+1
  double down;  // T-(k): k -> k-1
};

namespace detail {

inline void check_count(const WellMixedConfig& cfg, int k) {
  if (k < 0 || k > cfg.N) {
    throw DomainError("cooperator count k=" + std::to_string(k) + " outside [0, " + std::to_string(cfg.N) + "]");
  }
}

// Payoffs evaluated algebraically for any k. At k = 0 (k = N) the cooperator
// (defector) value coincides with the payoff of a Samaritan (Malicious) AI,
// which is what the boundary transitions need.
inline AvgPayoffs raw_avg_payoffs(const WellMixedConfig& cfg, int k) {
  const auto& m = cfg.matrix;
  const double N = cfg.N, M = cfg.M, kk = k;
  const int c = indicator(cfg.ai, AIBehavior::Samaritan);
  const int d = indicator(cfg.ai, AIBehavior::Malicious);
  const int ir = indicator(cfg.ai, AIBehavior::Discriminatory);
  const double denom = N + M - 1.0;
  const double coop = ((kk - 1.0) * m.R + (N - kk) * m.S + M * (c * m.R + d * m.S + ir * m.R)) / denom;
  const double def = (kk * m.T + (N - kk - 1.0) * m.P + M * (c * m.T + d * m.P + ir * m.P)) / denom;
  return {coop, def};
}

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double safe_log(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline double cooperator_payoff(const WellMixedConfig& cfg, int k) {
  detail::check_count(cfg, k);
  if (k == 0) throw DomainError("Pi_C is undefined without human cooperators (k = 0)");
  return detail::raw_avg_payoffs(cfg, k).cooperator;
}

inline double defector_payoff(const WellMixedConfig& cfg, int k) {
  detail::check_count(cfg, k);
  if (k == cfg.N) throw DomainError("Pi_D is undefined without human defectors (k = N)");
  return detail::raw_avg_payoffs(cfg, k).defector;
}

/// Average payoffs of a human cooperator and a human defector when k of the
/// N humans cooperate. Requires 1 <= k <= N-1 so both types exist.
inline AvgPayoffs avg_payoffs(const WellMixedConfig& cfg, int k) {
  return {cooperator_payoff(cfg, k), defector_payoff(cfg, k)};
}

/// Logs of T+(k) and T-(k); -inf where the probability is exactly zero.
///
/// The focal learner is a human (defector for T+, cooperator for T-); the
/// role model is drawn from the N+M agents. Human role models are imitated
/// with beta_H, Samaritan/Malicious AIs with beta_AI, Discriminatory AIs
/// never change the learner's strategy.
inline Transitions log_transition_probs(const WellMixedConfig& cfg, int k) {
  detail::check_count(cfg, k);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const double N = cfg.N, M = cfg.M, kk = k;
  const auto pay = detail::raw_avg_payoffs(cfg, k);
  const double log_pool = std::log(N + M);

  const double ai_coop = indicator(cfg.ai, AIBehavior::Samaritan) * M;
  const double ai_def = indicator(cfg.ai, AIBehavior::Malicious) * M;

  double up = kNegInf;
  if (k < cfg.N) {
    const double human = detail::safe_log(kk) - log_pool + log_fermi_prob(pay.defector, pay.cooperator, cfg.beta_H);
    const double ai = detail::safe_log(ai_coop) - log_pool + log_fermi_prob(pay.defector, pay.cooperator, cfg.beta_AI);
    up = std::log((N - kk) / N) + detail::log_add(human, ai);
  }
  double down = kNegInf;
  if (k > 0) {
    const double human = detail::safe_log(N - kk) - log_pool + log_fermi_prob(pay.cooperator, pay.defector, cfg.beta_H);
    const double ai = detail::safe_log(ai_def) - log_pool + log_fermi_prob(pay.cooperator, pay.defector, cfg.beta_AI);
    down = std::log(kk / N) + detail::log_add(human, ai);
  }
  return {up, down};
}

inline Transitions transition_probs(const WellMixedConfig& cfg, int k) {
  const auto l = log_transition_probs(cfg, k);
  return {std::exp(l.up), std::exp(l.down)};
}

/// r = prod_{k=1}^{N-1} T+(k) / T-(k), the ratio of the fixation
/// probability of a cooperator to that of a defector.
inline LogValue fixation_ratio(const WellMixedConfig& cfg) {
  cfg.validate();
  double acc = 0.0;
  for (int k = 1; k < cfg.N; ++k) {
    const auto l = log_transition_probs(cfg, k);
    acc += l.up - l.down;
  }
  return LogValue::from_log(acc);
}

/// Probability that a single `invader` takes over a population of N-1
/// humans of the other strategy:
///   rho = 1 / (1 + sum_{i=1}^{N-1} prod_{j=1}^{i} T-(j)/T+(j))
/// for a cooperator, and the mirrored product from k = N-1 downwards for a
/// defector.
inline double fixation_probability(const WellMixedConfig& cfg, Strategy invader) {
  cfg.validate();
  const int n = cfg.N;
  std::vector<double> log_ratio(static_cast<std::size_t>(n));  // log T-(j)/T+(j), j = 1..N-1
  for (int j = 1; j < n; ++j) {
    const auto l = log_transition_probs(cfg, j);
    log_ratio[static_cast<std::size_t>(j)] = l.down - l.up;
  }
  // log of the denominator, accumulated with log-sum-exp starting from log 1
  double log_denom = 0.0;
  double partial = 0.0;
  if (invader == Strategy::Cooperate) {
    for (int i = 1; i < n; ++i) {
      partial += log_ratio[static_cast<std::size_t>(i)];
      log_denom = detail::log_add(log_denom, partial);
    }
  } else {
    for (int j = n - 1; j >= 1; --j) {
      partial -= log_ratio[static_cast<std::size_t>(j)];
      log_denom = detail::log_add(log_denom, partial);
    }
  }
  return std::exp(-log_denom);
}

inline double logistic_of_log(double log_r) {
  if (log_r >= 0.0) return 1.0 / (1.0 + std::exp(-log_r));
  const double e = std::exp(log_r);
  return e / (1.0 + e);
}

/// Fraction of time spent in the all-cooperator state in the small-mutation
/// limit, r / (1 + r).
inline double cooperation_frequency(const WellMixedConfig& cfg) {
  return logistic_of_log(fixation_ratio(cfg).log);
}

/// Closed-form sum_{k=1}^{N-1} (Pi_C(k) - Pi_D(k)) for the given behaviour.
inline double closed_form_F(AIBehavior ai, int N, int M, const PayoffMatrix& m) {
  if (N < 2) throw DomainError("closed form needs N >= 2");
  if (M < 0) throw DomainError("number of AIs must be non-negative");
  double ai_term = 0.0;
  switch (ai) {
    case AIBehavior::Samaritan: ai_term = m.R - m.T; break;
    case AIBehavior::Malicious: ai_term = m.S - m.P; break;
    case AIBehavior::Discriminatory: ai_term = m.R - m.P; break;
  }
  const double n = N, mm = M;
  const double denom = n + mm - 1.0;
  return (n - 1.0) / denom * ((m.P - m.R) + n * (m.S - m.P) + mm * ai_term) +
         (m.R + m.P - m.T - m.S) * n * (n - 1.0) / (2.0 * denom);
}

/// Role-model factor of the fixation ratio:
///   Samaritan      (N-1+M)! / ((N-1)! M!)
///   Malicious      (N-1)! M! / (N-1+M)!
///   Discriminatory 1
/// via lgamma. The Malicious form is prod_{k=1}^{N-1} (N-k)/(N-k+M).
inline LogValue closed_form_G(AIBehavior ai, int N, int M) {
  if (N < 2) throw DomainError("closed form needs N >= 2");
  if (M < 0) throw DomainError("number of AIs must be non-negative");
  const double log_binom = std::lgamma(N + M) - std::lgamma(N) - std::lgamma(M + 1.0);
  switch (ai) {
    case AIBehavior::Samaritan: return LogValue::from_log(log_binom);
    case AIBehavior::Malicious: return LogValue::from_log(-log_binom);
    case AIBehavior::Discriminatory: return LogValue::from_log(0.0);
  }
  return LogValue::from_log(0.0);
}

// H = beta F + log G; positive iff cooperation is risk dominant. The closed
// forms assume a single intensity of selection.
inline double risk_dominance_margin(const WellMixedConfig& cfg) {
  cfg.validate();
  if (cfg.beta_H != cfg.beta_AI) {
    throw DomainError("closed-form risk dominance requires beta_H == beta_AI");
  }
  return cfg.beta_H * closed_form_F(cfg.ai, cfg.N, cfg.M, cfg.matrix) + closed_form_G(cfg.ai, cfg.N, cfg.M).log;
}

inline bool risk_dominance(const WellMixedConfig& cfg) { return risk_dominance_margin(cfg) > 0.0; }

// The chain over monomorphic states has more than one stationary distribution.
class ReducibleChainError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Stationary distribution of the small-mutation chain over q monomorphic
/// states. `fixation(i, j)` is the probability that a single j-mutant takes
/// over a population in state i; the chain moves i -> j with probability
/// fixation(i, j) / (q - 1). Diagonal entries of the input are ignored.
inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& fixation) {
  const Eigen::Index q = fixation.rows();
  if (q < 2 || fixation.cols() != q) throw DomainError("fixation matrix must be square with q >= 2");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (i == j) continue;
      const double rho = fixation(i, j);
      if (!(rho >= 0.0 && rho <= 1.0)) {
        throw DomainError("fixation probabilities must lie in [0, 1]");
      }
      T(i, j) = rho / static_cast<double>(q - 1);
      off += T(i, j);
    }
    T(i, i) = 1.0 - off;
    if (T(i, i) < -1e-12 || T(i, i) > 1.0) throw DomainError("transition matrix is not stochastic");
  }

  const Eigen::MatrixXd A = T.transpose() - Eigen::MatrixXd::Identity(q, q);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  if (lu.dimensionOfKernel() != 1) {
    throw ReducibleChainError("chain has " + std::to_string(lu.dimensionOfKernel()) +
                              " independent stationary distributions");
  }
  // Replace one balance equation by the normalisation constraint.
  Eigen::MatrixXd B = A;
  B.row(q - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(q);
  rhs(q - 1) = 1.0;
  Eigen::VectorXd pi = B.fullPivLu().solve(rhs);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

inline constexpr int kBruteForceMaxN = 14;

/// Absorption probability of the explicit (N+1)-state chain, obtained from a
/// dense linear solve rather than the product formula. Starts from one
/// invader (k = 1 for a cooperator, k = N-1 for a defector). Both k = 0 and
/// k = N must be absorbing, which holds for M = 0 or Discriminatory AIs.
inline double brute_force_absorption(const WellMixedConfig& cfg, Strategy invader) {
  cfg.validate();
  const int n = cfg.N;
  if (n > kBruteForceMaxN) {
    throw DomainError("brute-force absorption limited to N <= " + std::to_string(kBruteForceMaxN));
  }
  const auto t0 = transition_probs(cfg, 0);
  const auto tn = transition_probs(cfg, n);
  if (t0.up > 0.0 || tn.down > 0.0) {
    throw DomainError("brute-force absorption needs both monomorphic states absorbing");
  }
  // Generator of the transient states k = 1..N-1, (I - Q), assembled
  // directly from the rates, and the one-step absorption column into the
  // invader's monomorphic state.
  const int transient = n - 1;
  Eigen::MatrixXd I_minus_Q = Eigen::MatrixXd::Zero(transient, transient);
  Eigen::VectorXd one_step = Eigen::VectorXd::Zero(transient);
  for (int k = 1; k < n; ++k) {
    const auto t = transition_probs(cfg, k);
    const int row = k - 1;
    I_minus_Q(row, row) = t.up + t.down;
    if (k + 1 < n) I_minus_Q(row, row + 1) = -t.up;
    if (k - 1 > 0) I_minus_Q(row, row - 1) = -t.down;
    if (invader == Strategy::Cooperate && k + 1 == n) one_step(row) = t.up;
    if (invader == Strategy::Defect && k - 1 == 0) one_step(row) = t.down;
  }
  const Eigen::VectorXd absorb = I_minus_Q.fullPivLu().solve(one_step);
  return invader == Strategy::Cooperate ? absorb(0) : absorb(transient - 1);
}

}  // namespace hybridcoop
