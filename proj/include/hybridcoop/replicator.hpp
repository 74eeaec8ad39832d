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

// Infinite-population pairwise-comparison dynamics for the fraction x of
// cooperators among humans, with a fixed share alpha of AIs in the whole
// population. Time is measured in units of N elementary steps.

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "hybridcoop/game.hpp"

namespace hybridcoop {

struct ReplicatorConfig {
  double alpha = 0.0;  // AI share of the population
  double beta_H = 1.0;
  double beta_AI = 1.0;
  AIBehavior ai = AIBehavior::Samaritan;
  PayoffMatrix matrix = PayoffMatrix(1.0, -1.0, 2.0, 0.0);

  void validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("AI fraction alpha must lie in [0, 1)");
    if (!(beta_H >= 0.0) || !(beta_AI >= 0.0)) throw DomainError("intensity of selection must be >= 0");
    if (ai == AIBehavior::Malicious) {
      throw DomainError("no replicator equation is defined for Malicious AIs");
    }
  }
};

enum class Stability { Stable, Unstable, Marginal };

inline constexpr std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "unknown";
}

struct FixedPoint {
  double x;
  Stability stability;
};

namespace detail {

inline void check_fraction(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cooperator fraction must lie in [0, 1]");
}

}  // namespace detail

/// Pi_C(x) - Pi_D(x).
inline double delta_f(const ReplicatorConfig& cfg, double x) {
  cfg.validate();
  detail::check_fraction(x);
  const auto& m = cfg.matrix;
  const double a = cfg.alpha;
  if (cfg.ai == AIBehavior::Samaritan) {
    return (m.R - m.T) * ((1.0 - a) * x + a) + (m.S - m.P) * (1.0 - a) * (1.0 - x);
  }
  return (m.R - m.T) * (1.0 - a) * x + (m.S - m.P) * (1.0 - a) * (1.0 - x) + a * (m.R - m.P);
}

/// Bracket of the Samaritan equation, x' = (1 - x) h(x):
///   h(x) = x (1 - alpha) tanh(beta_H df / 2) + alpha p_{D,C}(beta_AI)
inline double h_function(const ReplicatorConfig& cfg, double x) {
  if (cfg.ai != AIBehavior::Samaritan) throw DomainError("h(x) is defined for Samaritan AIs only");
  const double df = delta_f(cfg, x);
  return x * (1.0 - cfg.alpha) * std::tanh(cfg.beta_H * df / 2.0) + cfg.alpha * fermi_prob(0.0, df, cfg.beta_AI);
}

inline double rhs(const ReplicatorConfig& cfg, double x) {
  const double df = delta_f(cfg, x);
  const double human = x * (1.0 - cfg.alpha) * std::tanh(cfg.beta_H * df / 2.0);
  if (cfg.ai == AIBehavior::Samaritan) {
    return (1.0 - x) * (human + cfg.alpha * fermi_prob(0.0, df, cfg.beta_AI));
  }
  return (1.0 - x) * human;
}

/// Largest Samaritan share for which h(1) < 0, i.e. an interior rest point
/// is guaranteed: K / (1 + K) with K = (1 + e^{beta_AI (T-R)}) tanh(beta_H (T-R) / 2).
inline double critical_alpha(double beta_H, double beta_AI, const PayoffMatrix& m) {
  if (!(m.T > m.R)) throw DomainError("critical alpha requires T > R");
  if (!(beta_H >= 0.0) || !(beta_AI >= 0.0)) throw DomainError("intensity of selection must be >= 0");
  const double gap = m.T - m.R;
  // K / (1 + K) = 1 / (1 + 1/K); written so that large beta_AI saturates at 1.
  const double tanh_term = std::tanh(beta_H * gap / 2.0);
  if (tanh_term == 0.0) return 0.0;
  const double inv_k = 1.0 / ((1.0 + std::exp(beta_AI * gap)) * tanh_term);
  return 1.0 / (1.0 + inv_k);
}

inline constexpr int kRootScanPoints = 10000;
inline constexpr double kRootTolerance = 1e-10;
inline constexpr double kStabilityProbe = 1e-6;

namespace detail {

// Interior roots of rhs are the roots of this factor: h for Samaritan and
// df for Discriminatory (tanh keeps its sign).
inline double interior_factor(const ReplicatorConfig& cfg, double x) {
  return cfg.ai == AIBehavior::Samaritan ? h_function(cfg, x) : delta_f(cfg, x);
}

inline Stability classify(const ReplicatorConfig& cfg, double x) {
  const bool has_left = x - kStabilityProbe >= 0.0;
  const bool has_right = x + kStabilityProbe <= 1.0;
  const double left = has_left ? rhs(cfg, x - kStabilityProbe) : 0.0;
  const double right = has_right ? rhs(cfg, x + kStabilityProbe) : 0.0;
  const bool attracts_left = !has_left || left > 0.0;
  const bool attracts_right = !has_right || right < 0.0;
  const bool repels_left = !has_left || left < 0.0;
  const bool repels_right = !has_right || right > 0.0;
  if (attracts_left && attracts_right) return Stability::Stable;
  if (repels_left && repels_right) return Stability::Unstable;
  return Stability::Marginal;
}

}  // namespace detail

/// All rest points in [0, 1], ascending. x = 1 is always one; x = 0 is one
/// whenever rhs(0) vanishes (always for Discriminatory AIs). Interior roots
/// come from a sign-change scan followed by bisection.
///
/// If the interior factor vanishes identically (Discriminatory AIs in the
/// donation game have df = alpha b - c for every x, zero at alpha = c / b)
/// every x is at rest; only the endpoints are reported, both Marginal.
inline std::vector<FixedPoint> find_fixed_points(const ReplicatorConfig& cfg) {
  cfg.validate();
  const auto f = [&](double x) { return detail::interior_factor(cfg, x); };
  const auto& m = cfg.matrix;
  const double scale = std::max({std::fabs(m.R), std::fabs(m.S), std::fabs(m.T), std::fabs(m.P), 1.0});
  if (cfg.ai == AIBehavior::Discriminatory && std::fabs(f(0.0)) <= 1e-12 * scale &&
      std::fabs(f(1.0)) <= 1e-12 * scale) {
    // df is affine in x, so vanishing at both ends means it vanishes everywhere.
    return {{0.0, Stability::Marginal}, {1.0, Stability::Marginal}};
  }

  std::vector<double> roots;
  if (rhs(cfg, 0.0) == 0.0) roots.push_back(0.0);
  const auto bisect = [&](double lo, double hi, double flo) {
    while (hi - lo > kRootTolerance) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) return mid;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  double prev_x = 0.0;
  double prev_f = f(0.0);
  for (int i = 1; i <= kRootScanPoints; ++i) {
    const double x = static_cast<double>(i) / kRootScanPoints;
    const double fx = f(x);
    if (fx == 0.0) {
      if (i < kRootScanPoints) roots.push_back(x);
    } else if (prev_f != 0.0 && (prev_f < 0.0) != (fx < 0.0)) {
      roots.push_back(bisect(prev_x, x, prev_f));
    }
    prev_x = x;
    prev_f = fx;
  }
  if (roots.empty() || roots.back() != 1.0) roots.push_back(1.0);

  std::vector<FixedPoint> out;
  out.reserve(roots.size());
  for (double x : roots) out.push_back({x, detail::classify(cfg, x)});
  return out;
}

struct TrajectoryPoint {
  double t;
  double x;
};

/// Classical fourth-order Runge-Kutta from x0 up to t_end with step dt; the
/// last step is shortened to land on t_end. x is clamped to [0, 1] after each
/// step. Every `stride`-th state is recorded, plus the endpoints.
inline std::vector<TrajectoryPoint> integrate(const ReplicatorConfig& cfg, double x0, double t_end, double dt,
                                              int stride = 1) {
  cfg.validate();
  detail::check_fraction(x0);
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(t_end >= 0.0)) throw DomainError("end time must be non-negative");
  if (stride < 1) throw DomainError("stride must be >= 1");

  const auto f = [&](double x) { return rhs(cfg, std::clamp(x, 0.0, 1.0)); };
  std::vector<TrajectoryPoint> traj{{0.0, x0}};
  double x = x0;
  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  for (long long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double h = std::min(dt, t_end - t);
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    x = std::clamp(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0, 1.0);
    if ((i + 1) % stride == 0 || i + 1 == steps) traj.push_back({t + h, x});
  }
  return traj;
}

}  // namespace hybridcoop
