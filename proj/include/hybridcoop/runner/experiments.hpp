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

// Experiment drivers behind the `simulate` tool. Each driver enumerates its
// grid cells and output files up front, writes the run manifest, then fills
// the outputs. Cell results land in pre-indexed slots so file contents never
// depend on the number of workers.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hybridcoop/abm.hpp"
#include "hybridcoop/finite_markov.hpp"
#include "hybridcoop/graph.hpp"
#include "hybridcoop/replicator.hpp"
#include "hybridcoop/rng.hpp"
#include "hybridcoop/runner/config.hpp"
#include "hybridcoop/runner/output.hpp"

namespace hybridcoop::runner {

inline constexpr std::string_view kToolName = "hybridcoop-simulate";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kManifestName = "run.manifest";

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  bool resume = false;  // abm only: skip cells already in aggregate.csv
};

struct RunReport {
  std::vector<std::string> files;        // relative to out_dir, manifest first
  std::optional<std::string> failure;    // first failing cell, if any
};

namespace detail {

inline std::string cell_failure(const std::string& coords, const std::exception& e) {
  return "cell " + coords + ": " + e.what();
}

class Manifest {
 public:
  Manifest(const ExperimentSpec& spec, const std::filesystem::path& dir) : path_(dir / kManifestName) {
    lines_.emplace_back("tool", std::string(kToolName));
    lines_.emplace_back("tool_version", std::string(kToolVersion));
    lines_.emplace_back("csv_schema_version", std::to_string(kCsvSchemaVersion));
    lines_.emplace_back("started", utc_timestamp());
    lines_.emplace_back("master_seed", std::to_string(spec.seed));
    for (const auto& [k, v] : resolved_entries(spec)) lines_.emplace_back(std::string(kManifestConfigPrefix) + k, v);
  }

  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }

  void write() const {
    std::ostringstream os;
    for (const auto& [k, v] : lines_) os << k << '=' << v << '\n';
    write_text(path_, os.str());
  }

  void finish(const std::optional<std::string>& failure) const {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << "finished=" << utc_timestamp() << '\n';
    out << "status=" << (failure ? "failed" : "ok") << '\n';
  }

 private:
  std::filesystem::path path_;
  std::vector<std::pair<std::string, std::string>> lines_;
};

inline double beta_ai_or(const std::optional<double>& beta_ai, double beta) { return beta_ai.value_or(beta); }

}  // namespace detail

// ---------------------------------------------------------------------------
// finite: cooperation frequency r / (1 + r) over the (M, b) grid, one CSV per
// (AI behaviour, beta).

inline std::string finite_file_name(AIBehavior ai, double beta) {
  return "finite_" + std::string(to_string(ai)) + "_beta" + format_number(beta) + ".csv";
}

inline RunReport run_finite(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto& f = spec.finite;
  std::filesystem::create_directories(opt.out_dir);
  RunReport report{{std::string(kManifestName)}, std::nullopt};
  for (auto ai : f.ai) {
    for (double beta : f.beta) report.files.push_back(finite_file_name(ai, beta));
  }
  detail::Manifest manifest(spec, opt.out_dir);
  for (std::size_t i = 1; i < report.files.size(); ++i) manifest.add("output", report.files[i]);
  manifest.write();

  struct Cell {
    AIBehavior ai;
    double beta;
    int M;
    double b;
  };
  std::vector<Cell> cells;
  for (auto ai : f.ai) {
    for (double beta : f.beta) {
      for (int m : f.M) {
        for (double b : f.b) cells.push_back({ai, beta, m, b});
      }
    }
  }
  std::vector<double> values(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(cells.size(), opt.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    try {
      WellMixedConfig cfg{f.N, c.M, c.beta, detail::beta_ai_or(f.beta_ai, c.beta), c.ai,
                          donation_matrix({c.b, f.c})};
      values[i] = cooperation_frequency(cfg);
    } catch (const std::exception& e) {
      errors[i] = detail::cell_failure("ai=" + std::string(to_string(c.ai)) + " beta=" + format_number(c.beta) +
                                           " M=" + std::to_string(c.M) + " b=" + format_number(c.b),
                                       e);
    }
  });

  std::size_t i = 0;
  for (auto ai : f.ai) {
    for (double beta : f.beta) {
      CsvWriter csv(opt.out_dir / finite_file_name(ai, beta), {"M", "b", "coop_frequency"});
      for (std::size_t n = 0; n < f.M.size() * f.b.size(); ++n, ++i) {
        if (!errors[i].empty()) {
          if (!report.failure) report.failure = errors[i];
          continue;
        }
        csv.row({std::to_string(cells[i].M), format_number(cells[i].b), format_number(values[i])});
      }
    }
  }
  manifest.finish(report.failure);
  return report;
}

// ---------------------------------------------------------------------------
// replicator: fixed points and critical alpha per cell, the rhs curve
// (1 - x) h(x) on a uniform x grid, and optional trajectories.

inline std::string replicator_tag(AIBehavior ai, double alpha, double beta, double b) {
  return std::string(to_string(ai)) + "_alpha" + format_number(alpha) + "_beta" + format_number(beta) + "_b" +
         format_number(b);
}

inline RunReport run_replicator(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto& p = spec.replicator;
  std::filesystem::create_directories(opt.out_dir);

  struct Cell {
    ReplicatorConfig cfg;
    double b;
    std::string tag;
  };
  std::vector<Cell> cells;
  for (auto ai : p.ai) {
    for (double alpha : p.alpha) {
      for (double beta : p.beta) {
        for (double b : p.b) {
          ReplicatorConfig cfg{alpha, beta, detail::beta_ai_or(p.beta_ai, beta), ai, donation_matrix({b, p.c})};
          cells.push_back({cfg, b, replicator_tag(ai, alpha, beta, b)});
        }
      }
    }
  }

  RunReport report{{std::string(kManifestName), "fixed_points.csv"}, std::nullopt};
  for (const auto& c : cells) {
    report.files.push_back("curve_" + c.tag + ".csv");
    for (double x0 : p.x0) report.files.push_back("traj_" + c.tag + "_x0" + format_number(x0) + ".csv");
  }
  detail::Manifest manifest(spec, opt.out_dir);
  for (std::size_t i = 1; i < report.files.size(); ++i) manifest.add("output", report.files[i]);
  manifest.write();

  struct Result {
    std::optional<double> alpha_c;
    std::vector<FixedPoint> fixed_points;
    std::string error;
  };
  std::vector<Result> results(cells.size());
  parallel_for(cells.size(), opt.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    Result& res = results[i];
    try {
      if (c.cfg.ai == AIBehavior::Samaritan) res.alpha_c = critical_alpha(c.cfg.beta_H, c.cfg.beta_AI, c.cfg.matrix);
      res.fixed_points = find_fixed_points(c.cfg);
      {
        CsvWriter curve(opt.out_dir / ("curve_" + c.tag + ".csv"), {"x", "rhs"});
        for (int k = 0; k < p.curve_points; ++k) {
          const double x = static_cast<double>(k) / (p.curve_points - 1);
          curve.row({format_number(x), format_number(rhs(c.cfg, x))});
        }
      }
      for (double x0 : p.x0) {
        CsvWriter traj(opt.out_dir / ("traj_" + c.tag + "_x0" + format_number(x0) + ".csv"), {"t", "x"});
        for (const auto& pt : integrate(c.cfg, x0, p.t_end, p.dt, p.trajectory_stride)) {
          traj.row({format_number(pt.t), format_number(pt.x)});
        }
      }
    } catch (const std::exception& e) {
      res.error = detail::cell_failure(c.tag, e);
    }
  });

  CsvWriter table(opt.out_dir / "fixed_points.csv",
                  {"ai", "alpha", "beta_H", "beta_AI", "b", "c", "alpha_c", "x", "stability"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& res = results[i];
    if (!res.error.empty()) {
      if (!report.failure) report.failure = res.error;
      continue;
    }
    for (const auto& fp : res.fixed_points) {
      table.row({std::string(to_string(c.cfg.ai)), format_number(c.cfg.alpha), format_number(c.cfg.beta_H),
                 format_number(c.cfg.beta_AI), format_number(c.b), format_number(p.c),
                 res.alpha_c ? format_number(*res.alpha_c) : "", format_number(fp.x),
                 std::string(to_string(fp.stability))});
    }
  }
  manifest.finish(report.failure);
  return report;
}

// ---------------------------------------------------------------------------
// abm: replicated agent-based runs per (AI behaviour, beta, b, AI fraction).

inline constexpr std::uint64_t kNetworkStream = 0x6e6574776f726b73ULL;  // independent of cell seeds

inline std::string timeseries_file_name(std::size_t cell, std::size_t run) {
  return "ts_cell" + std::to_string(cell) + "_run" + std::to_string(run) + ".csv";
}

inline std::string snapshot_file_name(std::size_t cell, std::uint64_t step) {
  return "snap_cell" + std::to_string(cell) + "_step" + std::to_string(step) + ".txt";
}

inline std::string network_file_name(std::size_t k) { return "network_" + std::to_string(k) + ".edges"; }

inline void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts) {
  CsvWriter csv(path, {"step", "coop_frac", "def_frac", "mean_fitness", "cooperators", "defectors"});
  for (const auto& s : ts.samples) {
    csv.row({std::to_string(s.step), format_number(s.coop_frac), format_number(s.def_frac),
             format_number(s.mean_fitness), std::to_string(s.cooperators), std::to_string(s.defectors)});
  }
}

// Number of leading cells already recorded in an aggregate file.
inline std::size_t completed_cells(const std::filesystem::path& aggregate_path) {
  std::ifstream in(aggregate_path);
  if (!in) return 0;
  std::string line;
  std::getline(in, line);  // header
  std::size_t done = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.substr(0, line.find(',')) != std::to_string(done)) break;
    ++done;
  }
  return done;
}

inline RunReport run_abm(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto& a = spec.abm;
  std::filesystem::create_directories(opt.out_dir);
  const std::size_t n = a.node_count();

  std::vector<std::shared_ptr<const Graph>> networks;
  std::vector<std::uint64_t> network_seeds;
  if (a.topology == Topology::Lattice) {
    networks.push_back(std::make_shared<const Graph>(square_lattice(a.rows, a.cols, a.periodic)));
  } else if (a.topology == Topology::Complete) {
    networks.push_back(std::make_shared<const Graph>(complete(a.nodes)));
  } else {
    for (std::size_t k = 0; k < a.networks; ++k) {
      network_seeds.push_back(derive_seed(spec.seed ^ kNetworkStream, k));
      networks.push_back(std::make_shared<const Graph>(barabasi_albert(a.nodes, a.ba_m, network_seeds.back())));
    }
  }

  struct Cell {
    AIBehavior ai;
    double beta;
    double b;
    double fraction;
    std::size_t ai_count;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (auto ai : a.ai) {
    for (double beta : a.beta) {
      for (double b : a.b) {
        for (double fr : a.ai_fraction) {
          const auto count = static_cast<std::size_t>(std::llround(fr * static_cast<double>(n)));
          cells.push_back({ai, beta, b, fr, count, derive_seed(spec.seed, cells.size())});
        }
      }
    }
  }

  const bool lattice = a.topology == Topology::Lattice;
  RunReport report{{std::string(kManifestName), "aggregate.csv"}, std::nullopt};
  for (std::size_t k = 0; k < network_seeds.size(); ++k) report.files.push_back(network_file_name(k));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t r = 0; r < a.runs; ++r) report.files.push_back(timeseries_file_name(c, r));
    if (lattice) {
      for (auto s : a.snapshot_steps) report.files.push_back(snapshot_file_name(c, s));
    }
  }

  detail::Manifest manifest(spec, opt.out_dir);
  for (std::size_t k = 0; k < network_seeds.size(); ++k) {
    manifest.add("network_seed." + std::to_string(k), std::to_string(network_seeds[k]));
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    manifest.add("cell_seed." + std::to_string(c), std::to_string(cells[c].seed));
    for (std::size_t r = 0; r < a.runs; ++r) {
      manifest.add("seed.cell" + std::to_string(c) + ".run" + std::to_string(r),
                   std::to_string(derive_seed(cells[c].seed, r)));
    }
  }
  for (std::size_t i = 1; i < report.files.size(); ++i) manifest.add("output", report.files[i]);
  manifest.write();

  for (std::size_t k = 0; k < network_seeds.size(); ++k) {
    std::ostringstream os;
    write_edge_list(os, *networks[k]);
    write_text(opt.out_dir / network_file_name(k), os.str());
  }

  const auto aggregate_path = opt.out_dir / "aggregate.csv";
  const std::size_t skip = opt.resume ? completed_cells(aggregate_path) : 0;
  CsvWriter table(aggregate_path,
                  {"cell", "topology", "ai", "ai_fraction", "ai_count", "beta_H", "beta_AI", "b", "c", "steps",
                   "sample_window", "runs", "mean", "std", "seeds"},
                  skip > 0);

  for (std::size_t c = skip; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    SimConfig cfg;
    cfg.graph = networks.front();
    cfg.ai_count = cell.ai_count;
    cfg.ai_behavior = cell.ai;
    cfg.beta_H = cell.beta;
    cfg.beta_AI = detail::beta_ai_or(a.beta_ai, cell.beta);
    cfg.steps = a.steps;
    cfg.sample_window = a.sample_window;
    cfg.sample_interval = a.sample_interval;
    cfg.placement = a.hub_placement ? AIPlacement::HubBiased : AIPlacement::Uniform;
    cfg.initial_cooperation = a.initial_cooperation;
    try {
      cfg.matrix = donation_matrix({cell.b, a.c});
      std::vector<double> values(a.runs);
      std::vector<std::uint64_t> seeds(a.runs);
      parallel_for(a.runs, opt.workers, [&](std::size_t r) {
        SimConfig rc = cfg;
        rc.seed = derive_seed(cell.seed, r);
        rc.graph = networks[r % networks.size()];
        const auto snaps = r == 0 ? std::span<const std::uint64_t>(a.snapshot_steps) : std::span<const std::uint64_t>{};
        const RunResult res = run(rc, snaps);
        values[r] = res.summary.final_cooperation;
        seeds[r] = rc.seed;
        write_timeseries_csv(opt.out_dir / timeseries_file_name(c, r), res.series);
        for (const auto& [step, grid] : res.snapshots) write_text(opt.out_dir / snapshot_file_name(c, step), grid);
      });
      const Aggregate agg = aggregate(std::move(values), std::move(seeds));
      std::string seed_list;
      for (std::size_t r = 0; r < agg.seeds.size(); ++r) {
        if (r) seed_list += ';';
        seed_list += std::to_string(agg.seeds[r]);
      }
      table.row({std::to_string(c), std::string(to_string(a.topology)), std::string(to_string(cell.ai)),
                 format_number(cell.fraction), std::to_string(cell.ai_count), format_number(cfg.beta_H),
                 format_number(cfg.beta_AI), format_number(cell.b), format_number(a.c), std::to_string(a.steps),
                 std::to_string(a.sample_window), std::to_string(agg.runs), format_number(agg.mean),
                 format_number(agg.std), seed_list});
      table.flush();
    } catch (const std::exception& e) {
      report.failure = detail::cell_failure(
          std::to_string(c) + " (ai=" + std::string(to_string(cell.ai)) + " beta=" + format_number(cell.beta) +
              " b=" + format_number(cell.b) + " ai_fraction=" + format_number(cell.fraction) + ")",
          e);
      break;
    }
  }
  manifest.finish(report.failure);
  return report;
}

inline RunReport run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
  switch (spec.mode) {
    case Mode::Finite: return run_finite(spec, opt);
    case Mode::Replicator: return run_replicator(spec, opt);
    case Mode::Abm: return run_abm(spec, opt);
  }
  return {};
}

}  // namespace hybridcoop::runner
