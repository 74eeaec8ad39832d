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

// One-shot Prisoner's Dilemma primitives shared by every model in the
// library: the payoff matrix, the donation-game reduction, the three fixed
// AI behaviours and the Fermi imitation probability.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hybridcoop {

// Raised whenever an argument lies outside the domain of a model quantity.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Strategy : std::uint8_t { Cooperate = 0, Defect = 1 };

// Samaritan always cooperates, Malicious always defects and Discriminatory
// mirrors its partner (perfect intention recognition).
enum class AIBehavior : std::uint8_t { Samaritan = 0, Malicious = 1, Discriminatory = 2 };

inline constexpr Strategy opposite(Strategy s) noexcept {
  return s == Strategy::Cooperate ? Strategy::Defect : Strategy::Cooperate;
}

inline constexpr char to_char(Strategy s) noexcept {
  return s == Strategy::Cooperate ? 'C' : 'D';
}

inline constexpr std::string_view to_string(AIBehavior ai) noexcept {
  switch (ai) {
    case AIBehavior::Samaritan: return "samaritan";
    case AIBehavior::Malicious: return "malicious";
    case AIBehavior::Discriminatory: return "discriminatory";
  }
  return "unknown";
}

// Accepts the long names as well as the short tags C, D and IR.
inline std::optional<AIBehavior> parse_ai_behavior(std::string_view s) {
  if (s == "samaritan" || s == "C") return AIBehavior::Samaritan;
  if (s == "malicious" || s == "D") return AIBehavior::Malicious;
  if (s == "discriminatory" || s == "IR") return AIBehavior::Discriminatory;
  return std::nullopt;
}

// 1 iff both behaviours coincide; the delta used to select AI terms.
inline constexpr int indicator(AIBehavior ai, AIBehavior st) noexcept { return ai == st ? 1 : 0; }

/// Row player's payoffs R (mutual cooperation), S (sucker), T (temptation)
/// and P (mutual defection).
///
/// `strict()` checks T > R > P > S and throws; the plain constructor accepts
/// any values and records whether the ordering holds, since the closed forms
/// are algebraic in R, S, T, P.
class PayoffMatrix {
 public:
  constexpr PayoffMatrix(double reward, double sucker, double temptation, double punishment) noexcept
      : R(reward), S(sucker), T(temptation), P(punishment) {}

  static PayoffMatrix strict(double reward, double sucker, double temptation, double punishment) {
    PayoffMatrix m(reward, sucker, temptation, punishment);
    if (!m.is_prisoners_dilemma()) {
      throw DomainError("payoff matrix violates T > R > P > S");
    }
    return m;
  }

  constexpr bool is_prisoners_dilemma() const noexcept { return T > R && R > P && P > S; }

  double R;
  double S;
  double T;
  double P;
};

struct DonationParams {
  double b;  // benefit delivered to the partner
  double c;  // cost paid by the cooperator
};

inline PayoffMatrix donation_matrix(DonationParams p) {
  if (!(p.c > 0.0)) throw DomainError("donation game requires c > 0");
  if (!(p.b > p.c)) throw DomainError("donation game requires b > c");
  return PayoffMatrix(p.b - p.c, -p.c, p.b, 0.0);
}

// (payoff to first, payoff to second)
inline constexpr std::pair<double, double> payoff(Strategy s1, Strategy s2, const PayoffMatrix& m) noexcept {
  if (s1 == Strategy::Cooperate) {
    return s2 == Strategy::Cooperate ? std::pair{m.R, m.R} : std::pair{m.S, m.T};
  }
  return s2 == Strategy::Cooperate ? std::pair{m.T, m.S} : std::pair{m.P, m.P};
}

// Action the AI takes against a partner playing `partner`.
inline constexpr Strategy ai_action(AIBehavior ai, Strategy partner) noexcept {
  switch (ai) {
    case AIBehavior::Samaritan: return Strategy::Cooperate;
    case AIBehavior::Malicious: return Strategy::Defect;
    case AIBehavior::Discriminatory: return partner;
  }
  return partner;
}

/// (pi_{H,AI}, pi_{AI,H}) for a human playing `s` against an AI.
inline constexpr std::pair<double, double> human_ai_payoffs(Strategy s, AIBehavior ai,
                                                            const PayoffMatrix& m) noexcept {
  return payoff(s, ai_action(ai, s), m);
}

/// Probability that a learner with payoff `f_self` adopts the strategy of a
/// role model with payoff `f_other`: 1 / (1 + exp(-beta (f_other - f_self))).
///
/// Evaluated in the branch where the exponential cannot overflow, so large
/// exponents saturate to 0 or 1 instead of producing NaN.
inline double fermi_prob(double f_self, double f_other, double beta) noexcept {
  const double x = beta * (f_other - f_self);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log of fermi_prob, finite for any finite exponent.
inline double log_fermi_prob(double f_self, double f_other, double beta) noexcept {
  const double x = beta * (f_other - f_self);
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace hybridcoop
