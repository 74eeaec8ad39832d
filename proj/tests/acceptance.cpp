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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Runtime budgets are part of each criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hybridcoop/abm.hpp"
#include "hybridcoop/finite_markov.hpp"
#include "hybridcoop/graph.hpp"
#include "hybridcoop/replicator.hpp"
#include "hybridcoop/runner/config.hpp"
#include "hybridcoop/runner/experiments.hpp"

namespace hc = hybridcoop;
namespace fs = std::filesystem;

namespace {

constexpr hc::AIBehavior kSam = hc::AIBehavior::Samaritan;
constexpr hc::AIBehavior kMal = hc::AIBehavior::Malicious;
constexpr hc::AIBehavior kIR = hc::AIBehavior::Discriminatory;

struct Outcome {
  bool pass;
  std::string detail;
};

hc::PayoffMatrix random_pd(hc::Rng& rng) {
  std::array<double, 4> v;
  for (auto& x : v) x = 10 * rng.uniform01() - 5;
  std::sort(v.begin(), v.end());
  return hc::PayoffMatrix::strict(v[2], v[0], v[3], v[1]);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Absorption probabilities: product formula vs dense linear solve.
Outcome oracle_equivalence() {
  hc::Rng rng(101);
  std::vector<hc::PayoffMatrix> matrices;
  for (int i = 0; i < 50; ++i) matrices.push_back(random_pd(rng));
  double worst = 0.0;
  long checks = 0;
  const auto check = [&](const hc::WellMixedConfig& cfg) {
    for (auto s : {hc::Strategy::Cooperate, hc::Strategy::Defect}) {
      const double a = hc::fixation_probability(cfg, s);
      const double b = hc::brute_force_absorption(cfg, s);
      worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
      ++checks;
    }
  };
  for (const auto& m : matrices) {
    for (double beta : {0.0, 0.3, 1.0}) {
      for (int N = 2; N <= 10; ++N) {
        for (int M = 0; M <= 5; ++M) check(hc::well_mixed(N, M, beta, kIR, m));
        for (auto ai : {kSam, kMal}) check(hc::well_mixed(N, 0, beta, ai, m));
      }
    }
  }
  return {worst < 1e-12, fmt("%.0f comparisons, max relative difference %.3g", static_cast<double>(checks), worst)};
}

// log r from the product vs beta F + log G.
Outcome closed_form_consistency() {
  hc::Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + static_cast<int>(rng.index(49));
    const int M = static_cast<int>(rng.index(21));
    const double beta = 2 * rng.uniform01();
    const auto m = random_pd(rng);
    for (auto ai : {kSam, kMal, kIR}) {
      const double product = hc::fixation_ratio(hc::well_mixed(N, M, beta, ai, m)).log;
      const double closed = beta * hc::closed_form_F(ai, N, M, m) + hc::closed_form_G(ai, N, M).log;
      worst = std::max(worst, std::fabs(product - closed));
    }
  }
  return {worst < 1e-8, fmt("200 configs x 3 behaviours, max |difference| %.3g", worst)};
}

Outcome neutral_drift() {
  const auto m = hc::donation_matrix({2, 1});
  double worst = 0.0;
  for (int N = 2; N <= 50; ++N) {
    for (int M : {0, 1, 5, 20}) {
      const auto cfg = hc::well_mixed(N, M, 0.0, kIR, m);
      for (auto s : {hc::Strategy::Cooperate, hc::Strategy::Defect}) {
        worst = std::max(worst, std::fabs(hc::fixation_probability(cfg, s) - 1.0 / N));
      }
    }
  }
  double freq_worst = 0.0;
  for (int N = 2; N <= 50; ++N) {
    for (auto ai : {kSam, kMal, kIR}) {
      freq_worst = std::max(freq_worst, std::fabs(hc::cooperation_frequency(hc::well_mixed(N, 0, 0.0, ai, m)) - 0.5));
    }
  }
  return {worst < 1e-12 && freq_worst == 0.0,
          fmt("max |rho - 1/N| %.3g, max |freq - 0.5| %.3g", worst, freq_worst)};
}

Outcome weak_strong_selection_reversal() {
  int weak_ok = 0, strong_checked = 0, strong_ok = 0;
  for (int M : {10, 50, 90}) {
    for (double b : {2.0, 4.0, 6.0}) {
      const auto m = hc::donation_matrix({b, 1});
      const double sw = hc::cooperation_frequency(hc::well_mixed(100, M, 0.1, kSam, m));
      const double iw = hc::cooperation_frequency(hc::well_mixed(100, M, 0.1, kIR, m));
      weak_ok += sw >= iw;
      const double ss = hc::cooperation_frequency(hc::well_mixed(100, M, 5.0, kSam, m));
      const double is = hc::cooperation_frequency(hc::well_mixed(100, M, 5.0, kIR, m));
      if (std::fabs(ss - is) > 1e-6) {
        ++strong_checked;
        strong_ok += is >= ss;
      }
    }
  }
  return {weak_ok == 9 && strong_ok == strong_checked,
          fmt("beta=0.1: %.0f/9 cells Samaritan >= Discriminatory; beta=5: %.0f/%.0f differing cells reversed",
              weak_ok, strong_ok, strong_checked)};
}

Outcome critical_alpha() {
  const auto m = hc::donation_matrix({2, 1});
  double worst_a = 0.0, worst_c = 0.0;
  bool ok = true;
  for (double beta : {0.5, 1.0, 2.0}) {
    const double ac = hc::critical_alpha(beta, beta, m);
    worst_a = std::max(worst_a, std::fabs(ac + std::expm1(-beta)));
    const hc::ReplicatorConfig cfg{0.9 * ac, beta, beta, kSam, m};
    ok = ok && hc::h_function(cfg, 1.0) < 0.0;
    double root = -1.0;
    for (const auto& fp : hc::find_fixed_points(cfg)) {
      if (fp.x > 0.0 && fp.x < 1.0 && fp.stability == hc::Stability::Stable) root = std::max(root, fp.x);
    }
    if (root < 0.0) {
      ok = false;
      continue;
    }
    const double end = hc::integrate(cfg, 0.99, 1000.0, 0.01, 1000).back().x;
    worst_c = std::max(worst_c, std::fabs(end - root));
  }
  return {ok && worst_a < 1e-12 && worst_c < 1e-5,
          fmt("max |alpha_c - (1 - e^-beta)| %.3g, interior roots found, max |x(1000) - x*| %.3g", worst_a, worst_c)};
}

// On the complete graph the ABM fitness is a sum over N + M - 1 partners,
// i.e. N + M - 1 times the well-mixed average payoff, so ABM intensity beta
// corresponds to chain intensity beta (N + M - 1).
Outcome abm_bridge() {
  const int N = 30, M = 5;
  const double beta = 0.1;
  const auto m = hc::donation_matrix({2, 1});
  hc::SimConfig cfg;
  cfg.graph = std::make_shared<const hc::Graph>(hc::complete(N + M));
  cfg.ai_count = M;
  cfg.ai_behavior = kSam;
  cfg.matrix = m;
  cfg.beta_H = cfg.beta_AI = beta;
  cfg.steps = 200000;
  cfg.sample_window = 1;
  cfg.seed = 606;
  cfg.initial_cooperation = 0.0;
  const auto chain = hc::well_mixed(N, M, beta * (N + M - 1), kSam, m);

  auto s = hc::initialize(cfg);
  std::map<std::size_t, std::array<long, 3>> counts;  // k -> (events, ups, downs)
  for (std::uint64_t t = 0; t < cfg.steps; ++t) {
    const std::size_t k = s.human_cooperators;
    const auto ev = hc::step(s, cfg);
    auto& c = counts[k];
    ++c[0];
    c[1] += ev == hc::StepEvent::BecameCooperator;
    c[2] += ev == hc::StepEvent::BecameDefector;
  }
  int failures = 0;
  double worst_z = 0.0;
  for (const auto& [k, c] : counts) {
    const auto t = hc::transition_probs(chain, static_cast<int>(k));
    const double n = static_cast<double>(c[0]);
    for (auto [obs, p] : {std::pair{c[1], t.up}, std::pair{c[2], t.down}}) {
      const double se = std::sqrt(p * (1 - p) / n);
      const double diff = std::fabs(static_cast<double>(obs) / n - p);
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
      if (diff > 3 * se + 1e-15) ++failures;
    }
  }
  return {failures == 0, fmt("%.0f visited states, %.0f outside 3 SE, max |z| %.2f",
                             static_cast<double>(counts.size()), failures, worst_z)};
}

Outcome lattice_monotonicity() {
  hc::SimConfig cfg;
  cfg.graph = std::make_shared<const hc::Graph>(hc::square_lattice(20, 20, false));
  cfg.ai_behavior = kSam;
  cfg.matrix = hc::donation_matrix({2, 1});
  cfg.beta_H = cfg.beta_AI = 0.1;
  cfg.steps = 20000;
  cfg.sample_window = 1000;
  std::vector<double> means;
  for (double frac : {0.0, 0.1, 0.2, 0.3}) {
    cfg.ai_count = static_cast<std::size_t>(std::llround(frac * 400));
    means.push_back(hc::replicate(cfg, 10, 707, {}, std::max(1u, std::thread::hardware_concurrency())).mean);
  }
  bool ok = true;
  for (std::size_t i = 1; i < means.size(); ++i) ok = ok && means[i] - means[i - 1] >= -0.02;
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean cooperation at AI fraction 0/0.1/0.2/0.3: %.4f %.4f %.4f %.4f", means[0],
                means[1], means[2], means[3]);
  return {ok, buf};
}

Outcome ba_properties() {
  const std::size_t n = 1000, m = 2;
  const double expected = 2.0 * (m * (n - m - 1) + (m + 1) * m / 2) / static_cast<double>(n);
  int exact = 0, heavy = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto stats = hc::degree_stats(hc::barabasi_albert(n, m, seed));
    exact += stats.mean_degree == expected;
    heavy += static_cast<double>(stats.max_degree) >= 5 * stats.mean_degree;
  }
  return {exact == 10 && heavy >= 8,
          fmt("mean degree %.3f exact in %.0f/10 seeds; max >= 5x mean in %.0f/10", expected, exact, heavy)};
}

std::map<std::string, std::string> read_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("started=", 0) == 0 || line.rfind("finished=", 0) == 0) continue;
      os << line << '\n';
    }
    out[e.path().filename().string()] = os.str();
  }
  return out;
}

Outcome determinism() {
  namespace run = hc::runner;
  const fs::path root = fs::temp_directory_path() / "hybridcoop_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> configs = {
      "rows=10\ncols=10\nruns=3\nsteps=2000\nsample_window=500\nai_fraction=0,0.2\nbeta=0.1,5\nseed=9\n"
      "snapshot_steps=0,1000,2000\n",
      "topology=ba\nnodes=200\nnetworks=2\nruns=4\nsteps=2000\nsample_window=500\nai_fraction=0.1\nbeta=1\n"
      "placement=hub\nseed=10\n",
      "topology=complete\nnodes=30\nruns=2\nsteps=1000\nsample_window=100\nai=discriminatory\nai_fraction=0.2\n"
      "beta=1\nseed=11\n"};
  int identical = 0;
  std::size_t files = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::istringstream in(configs[i]);
    const auto spec = run::resolve_config(run::Mode::Abm, run::parse_key_values(in, "acceptance"));
    const fs::path a = root / (std::to_string(i) + "a"), b = root / (std::to_string(i) + "b");
    run::run_abm(spec, {a, 1, false});
    run::run_abm(spec, {b, 4, false});
    const auto oa = read_outputs(a), ob = read_outputs(b);
    files += oa.size();
    identical += oa == ob;
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(configs.size()),
          fmt("%.0f/3 configs byte-identical across two runs (%.0f files)", identical, static_cast<double>(files))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {"oracle equivalence of fixation probabilities", 5, oracle_equivalence},
      {"closed-form consistency of the fixation ratio", 5, closed_form_consistency},
      {"neutral drift", 5, neutral_drift},
      {"weak/strong selection reversal, Samaritan vs Discriminatory", 1, weak_strong_selection_reversal},
      {"critical alpha consistency", 1, critical_alpha},
      {"ABM to well-mixed chain bridge", 30, abm_bridge},
      {"lattice cooperation non-decreasing in AI fraction", 120, lattice_monotonicity},
      {"Barabasi-Albert degree properties", 5, ba_properties},
      {"ABM output determinism", 60, determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("%s [%d] %s: %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", index, c.name,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
