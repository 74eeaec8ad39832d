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

// Agent-based simulation of humans and fixed-behaviour AIs on a graph.
// Every agent's fitness is the sum of its payoffs against all neighbours;
// one elementary step lets a single randomly chosen human imitate a random
// neighbour with the Fermi probability.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hybridcoop/game.hpp"
#include "hybridcoop/graph.hpp"
#include "hybridcoop/rng.hpp"

namespace hybridcoop {

struct AgentRole {
  enum class Kind : std::uint8_t { Human, AI };

  static constexpr AgentRole human(Strategy s) { return {Kind::Human, s, AIBehavior::Samaritan}; }
  static constexpr AgentRole ai(AIBehavior b) { return {Kind::AI, Strategy::Cooperate, b}; }

  constexpr bool is_ai() const { return kind == Kind::AI; }
  constexpr bool operator==(const AgentRole&) const = default;

  Kind kind;
  Strategy strategy;    // meaningful for humans only
  AIBehavior behavior;  // meaningful for AIs only
};

/// Action `self` plays against `other`. Discriminatory AIs mirror the
/// partner's action; two Discriminatory AIs cooperate with each other.
inline constexpr Strategy resolve_action(const AgentRole& self, const AgentRole& other) {
  if (!self.is_ai()) return self.strategy;
  if (self.behavior != AIBehavior::Discriminatory) return ai_action(self.behavior, Strategy::Cooperate);
  if (!other.is_ai()) return other.strategy;
  if (other.behavior == AIBehavior::Discriminatory) return Strategy::Cooperate;
  return ai_action(other.behavior, Strategy::Cooperate);
}

// Payoff to i in the encounter (i, j).
inline constexpr double pairwise_payoff(const AgentRole& i, const AgentRole& j, const PayoffMatrix& m) {
  return payoff(resolve_action(i, j), resolve_action(j, i), m).first;
}

enum class AIPlacement : std::uint8_t { Uniform, HubBiased };

struct SimConfig {
  std::shared_ptr<const Graph> graph;
  std::size_t ai_count = 0;
  AIBehavior ai_behavior = AIBehavior::Samaritan;
  PayoffMatrix matrix = PayoffMatrix(1.0, -1.0, 2.0, 0.0);
  double beta_H = 1.0;
  double beta_AI = 1.0;
  std::uint64_t steps = 100000;
  std::uint64_t sample_window = 1000;   // summary averages the final window
  std::uint64_t sample_interval = 100;  // time-series stride
  std::uint64_t seed = 0;
  AIPlacement placement = AIPlacement::Uniform;
  double initial_cooperation = 0.5;  // probability a human starts as C

  void validate() const {
    if (!graph) throw DomainError("simulation needs a graph");
    if (ai_count >= graph->node_count()) throw DomainError("ai_count must be smaller than the number of nodes");
    if (steps == 0) throw DomainError("steps must be positive");
    if (sample_window == 0 || sample_window > steps) throw DomainError("sample_window must lie in [1, steps]");
    if (sample_interval == 0) throw DomainError("sample_interval must be positive");
    if (!(beta_H >= 0.0) || !(beta_AI >= 0.0)) throw DomainError("intensity of selection must be >= 0");
    if (!(initial_cooperation >= 0.0 && initial_cooperation <= 1.0)) {
      throw DomainError("initial_cooperation must lie in [0, 1]");
    }
  }
};

struct SimState {
  std::shared_ptr<const Graph> graph;
  std::vector<AgentRole> roles;
  std::vector<double> fitness;
  std::vector<NodeId> humans;  // ascending node ids of human agents
  std::size_t human_cooperators = 0;
  std::uint64_t step_index = 0;
  Rng rng;

  std::size_t human_count() const { return humans.size(); }
  double cooperation_fraction() const {
    return static_cast<double>(human_cooperators) / static_cast<double>(humans.size());
  }
};

// Fitness of node i from scratch.
inline double node_fitness(const Graph& g, std::span<const AgentRole> roles, NodeId i, const PayoffMatrix& m) {
  double f = 0.0;
  for (NodeId j : g.neighbors(i)) f += pairwise_payoff(roles[i], roles[j], m);
  return f;
}

inline std::vector<double> recompute_fitness(const SimState& s, const PayoffMatrix& m) {
  std::vector<double> f(s.roles.size());
  for (NodeId i = 0; i < s.roles.size(); ++i) f[i] = node_fitness(*s.graph, s.roles, i, m);
  return f;
}

/// Places the AIs (uniformly at random, or on the highest-degree nodes with
/// ties broken by id), draws the human strategies and computes all fitness.
inline SimState initialize(const SimConfig& cfg) {
  cfg.validate();
  const Graph& g = *cfg.graph;
  const std::size_t n = g.node_count();
  SimState s{cfg.graph, std::vector<AgentRole>(n, AgentRole::human(Strategy::Defect)), {}, {}, 0, 0, Rng(cfg.seed)};

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  if (cfg.placement == AIPlacement::Uniform) {
    for (std::size_t i = 0; i < cfg.ai_count; ++i) {
      std::swap(order[i], order[i + s.rng.index(n - i)]);
    }
  } else {
    std::stable_sort(order.begin(), order.end(), [&g](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
  }
  for (std::size_t i = 0; i < cfg.ai_count; ++i) s.roles[order[i]] = AgentRole::ai(cfg.ai_behavior);

  for (NodeId i = 0; i < n; ++i) {
    if (s.roles[i].is_ai()) continue;
    s.humans.push_back(i);
    if (s.rng.bernoulli(cfg.initial_cooperation)) {
      s.roles[i].strategy = Strategy::Cooperate;
      ++s.human_cooperators;
    }
  }
  s.fitness = recompute_fitness(s, cfg.matrix);
  return s;
}

enum class StepEvent : std::uint8_t { None, BecameCooperator, BecameDefector };

/// One asynchronous imitation event. A human learner is drawn uniformly, then
/// a uniform neighbour as role model. Human models are copied with beta_H,
/// Samaritan/Malicious AIs with beta_AI (the learner adopts C/D); copying a
/// Discriminatory AI would reproduce the learner's own action, so it never
/// changes anything. Fitness is refreshed for the learner and its neighbours.
inline StepEvent step(SimState& s, const SimConfig& cfg) {
  const Graph& g = *s.graph;
  ++s.step_index;
  const NodeId focal = s.humans[s.rng.index(s.humans.size())];
  const auto& nbrs = g.neighbors(focal);
  if (nbrs.empty()) return StepEvent::None;
  const NodeId model = nbrs[s.rng.index(nbrs.size())];

  const AgentRole& model_role = s.roles[model];
  const Strategy current = s.roles[focal].strategy;
  Strategy target = current;
  double beta = cfg.beta_H;
  if (!model_role.is_ai()) {
    target = model_role.strategy;
  } else if (model_role.behavior != AIBehavior::Discriminatory) {
    target = ai_action(model_role.behavior, current);
    beta = cfg.beta_AI;
  }
  if (target == current) return StepEvent::None;
  if (!s.rng.bernoulli(fermi_prob(s.fitness[focal], s.fitness[model], beta))) return StepEvent::None;

  const AgentRole before = s.roles[focal];
  s.roles[focal].strategy = target;
  double focal_fitness = 0.0;
  for (NodeId j : nbrs) {
    s.fitness[j] += pairwise_payoff(s.roles[j], s.roles[focal], cfg.matrix) -
                    pairwise_payoff(s.roles[j], before, cfg.matrix);
    focal_fitness += pairwise_payoff(s.roles[focal], s.roles[j], cfg.matrix);
  }
  s.fitness[focal] = focal_fitness;
  if (target == Strategy::Cooperate) {
    ++s.human_cooperators;
    return StepEvent::BecameCooperator;
  }
  --s.human_cooperators;
  return StepEvent::BecameDefector;
}

struct Sample {
  std::uint64_t step;
  double coop_frac;  // among humans
  double def_frac;
  double mean_fitness;  // over humans
  std::size_t cooperators;
  std::size_t defectors;
};

struct TimeSeries {
  std::vector<Sample> samples;
};

struct RunSummary {
  double final_cooperation;  // mean human C fraction over the final window
  std::size_t humans;
  std::size_t ais;
  std::uint64_t seed;
};

struct RunResult {
  TimeSeries series;
  SimState final_state;
  RunSummary summary;
  std::map<std::uint64_t, std::string> snapshots;  // step -> grid text
};

inline Sample sample(const SimState& s) {
  double total = 0.0;
  for (NodeId h : s.humans) total += s.fitness[h];
  const std::size_t n = s.humans.size();
  const double coop = s.cooperation_fraction();
  return {s.step_index, coop, 1.0 - coop, total / static_cast<double>(n), s.human_cooperators,
          n - s.human_cooperators};
}

/// Lattice state as text: 'C' cooperator, 'D' defector, 'A' AI, one
/// newline-terminated row per lattice row.
inline std::string snapshot(const SimState& s, std::size_t rows, std::size_t cols) {
  const auto& shape = s.graph->lattice();
  if (!shape || shape->rows != rows || shape->cols != cols) {
    throw DomainError("snapshot needs a " + std::to_string(rows) + "x" + std::to_string(cols) + " lattice");
  }
  std::string out;
  out.reserve(rows * (cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const AgentRole& role = s.roles[r * cols + c];
      out.push_back(role.is_ai() ? 'A' : to_char(role.strategy));
    }
    out.push_back('\n');
  }
  return out;
}

/// Runs cfg.steps elementary steps. The time series holds step 0, every
/// sample_interval-th step and the final step. Snapshots are taken at the
/// requested steps (lattice graphs only; ignored otherwise).
inline RunResult run(const SimConfig& cfg, std::span<const std::uint64_t> snapshot_steps = {}) {
  SimState s = initialize(cfg);
  TimeSeries series;
  std::map<std::uint64_t, std::string> snapshots;
  const auto& shape = cfg.graph->lattice();
  const auto maybe_snapshot = [&] {
    if (!shape) return;
    if (std::find(snapshot_steps.begin(), snapshot_steps.end(), s.step_index) != snapshot_steps.end()) {
      snapshots[s.step_index] = snapshot(s, shape->rows, shape->cols);
    }
  };

  series.samples.push_back(sample(s));
  maybe_snapshot();
  const std::uint64_t window_start = cfg.steps - cfg.sample_window;
  std::uint64_t window_cooperators = 0;  // sum of cooperator counts over the window
  for (std::uint64_t t = 1; t <= cfg.steps; ++t) {
    step(s, cfg);
    if (t > window_start) window_cooperators += s.human_cooperators;
    if (t % cfg.sample_interval == 0 || t == cfg.steps) series.samples.push_back(sample(s));
    maybe_snapshot();
  }
  const RunSummary summary{static_cast<double>(window_cooperators) /
                               (static_cast<double>(cfg.sample_window) * static_cast<double>(s.human_count())),
                           s.human_count(), cfg.ai_count, cfg.seed};
  return RunResult{std::move(series), std::move(s), summary, std::move(snapshots)};
}

struct Aggregate {
  double mean;
  double std;  // sample standard deviation, 0 for a single run
  std::size_t runs;
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;  // per-run summaries, by run index
};

inline Aggregate aggregate(std::vector<double> values, std::vector<std::uint64_t> seeds) {
  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {mean, sd, n, std::move(seeds), std::move(values)};
}

/// Calls body(i) for i in [0, count) on up to `workers` threads. Exceptions
/// are rethrown for the lowest failing index.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// `runs` independent runs; run i uses seed derive_seed(base_seed, i) and,
/// when `networks` is non-empty, network i mod networks.size() (e.g. the ten
/// pre-generated scale-free graphs). `on_run` sees every finished run.
template <typename OnRun>
Aggregate replicate(const SimConfig& cfg, std::size_t runs, std::uint64_t base_seed,
                    std::span<const std::shared_ptr<const Graph>> networks, unsigned workers, OnRun&& on_run) {
  if (runs == 0) throw DomainError("runs must be >= 1");
  std::vector<double> values(runs);
  std::vector<std::uint64_t> seeds(runs);
  parallel_for(runs, workers, [&](std::size_t i) {
    SimConfig c = cfg;
    c.seed = derive_seed(base_seed, i);
    if (!networks.empty()) c.graph = networks[i % networks.size()];
    const RunResult r = run(c);
    values[i] = r.summary.final_cooperation;
    seeds[i] = c.seed;
    on_run(i, r);
  });
  return aggregate(std::move(values), std::move(seeds));
}

inline Aggregate replicate(const SimConfig& cfg, std::size_t runs, std::uint64_t base_seed,
                           std::span<const std::shared_ptr<const Graph>> networks = {}, unsigned workers = 1) {
  return replicate(cfg, runs, base_seed, networks, workers, [](std::size_t, const RunResult&) {});
}

}  // namespace hybridcoop
