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

// simulate finite|replicator|abm --config <path> [--out <dir>] [--seed <u64>]
//          [--workers <n>] [--resume]

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "hybridcoop/runner/config.hpp"
#include "hybridcoop/runner/experiments.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool resume = false;
};

void add_common(CLI::App* sub, Args& args) {
  sub->add_option("--config", args.config, "key=value config file or a previous run.manifest")->required();
  sub->add_option("--out", args.out, "output directory")->capture_default_str();
  sub->add_option("--seed", args.seed, "master seed (overrides the config)");
  sub->add_option("--workers", args.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hybridcoop::runner;
  CLI::App app{"Cooperation in hybrid human-AI populations: analytics and agent-based simulation"};
  app.require_subcommand(1);
  Args args;
  auto* finite = app.add_subcommand("finite", "cooperation frequency over (M, b) for each AI behaviour and beta");
  auto* replicator = app.add_subcommand("replicator", "fixed points, rhs curves and trajectories");
  auto* abm = app.add_subcommand("abm", "replicated agent-based runs on a lattice, BA or complete graph");
  for (auto* sub : {finite, replicator, abm}) add_common(sub, args);
  abm->add_flag("--resume", args.resume, "skip cells already recorded in aggregate.csv");
  CLI11_PARSE(app, argc, argv);

  const Mode mode = finite->parsed() ? Mode::Finite : replicator->parsed() ? Mode::Replicator : Mode::Abm;
  try {
    ExperimentSpec spec = parse_config(mode, args.config);
    if (args.seed) spec.seed = *args.seed;
    const RunReport report = run_experiment(spec, {args.out, args.workers, args.resume});
    if (report.failure) {
      std::cerr << "simulate: " << *report.failure << '\n';
      return 1;
    }
    std::cout << "wrote " << report.files.size() << " files to " << args.out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
