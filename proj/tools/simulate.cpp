// Copyright 2026 The bidsim Authors.
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

// simulate: run a bidding scalability sweep and write CSV/SVG results.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bidsim/config_io.hpp"
#include "bidsim/experiment.hpp"

namespace {

constexpr const char* kOutDirEnv = "BIDSIM_OUT_DIR";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual-time simulator of single-stage bidding between service requesters and providers"};
  app.name("simulate");

  std::string config_path;
  std::optional<std::string> out_dir;
  bool plots = false;
  bool traces = false;
  bool population = false;
  std::optional<int> jobs;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  bool tau_c_printed = false;
  bool check_only = false;
  bool serial = false;

  app.add_option("--config", config_path, "JSON manifest; {} reproduces the default scenario")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, fmt::format("Output directory (overrides ${} and the manifest)", kOutDirEnv));
  app.add_flag("--plots", plots, "Write psi.svg and tau.svg");
  app.add_flag("--traces", traces, "Write one frame trace per run under traces/");
  app.add_flag("--population", population, "Write one population dump per run under population/");
  app.add_option("--jobs", jobs, "Worker threads for independent runs (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--mode", mode, "Discovery mode")->check(CLI::IsMember({"multicast", "broadcast"}));
  app.add_option("--seed", seed, "Master seed");
  app.add_flag("--tau-c-printed", tau_c_printed, "Divide summed cost by the success rate instead of the success count");
  app.add_flag("--check", check_only, "Validate the manifest and exit");
  app.add_flag("--serial", serial, "Use the single-threaded reference executor");

  CLI11_PARSE(app, argc, argv);

  auto load = bidsim::validate_config(config_path);
  if (!load.ok()) {
    std::cerr << config_path << ": " << load.errors.size() << " problem(s)\n";
    for (const auto& e : load.errors) std::cerr << "  " << e << "\n";
    return 2;
  }
  auto manifest = *load.manifest;

  if (const char* env = std::getenv(kOutDirEnv); env && *env) manifest.output_dir = env;
  if (out_dir) manifest.output_dir = *out_dir;
  if (plots) manifest.emit_plots = true;
  if (traces) manifest.emit_traces = true;
  if (population) manifest.emit_population = true;
  if (jobs) manifest.parallelism = *jobs;
  if (mode) manifest.config.mode = *bidsim::parse_discovery_mode(*mode);
  if (seed) manifest.config.master_seed = *seed;
  if (tau_c_printed) manifest.cost_normalization = bidsim::CostNormalization::Printed;

  if (check_only) {
    std::cout << bidsim::manifest_to_json(manifest);
    return 0;
  }

  try {
    const auto summary =
        bidsim::run_experiment(manifest, serial ? bidsim::Executor::Serial : bidsim::Executor::Parallel);
    for (const auto& a : summary.aggregates) {
      std::cout << fmt::format("k={:<4} psi={:.4f} dt={:.1f}s tau_cfp={:.3f} tau_mes={:.2f} tau_s={:.3f} tau_c={}\n",
                               a.k, a.psi_vs_baseline, a.delta_t.mean, a.tau_cfp.mean, a.tau_mes.mean, a.tau_s.mean,
                               a.tau_c ? fmt::format("{:.3f}", a.tau_c->mean) : std::string("-"));
    }
    std::cout << fmt::format("{} runs, {} failed, results in {}\n", summary.runs.size(), summary.failed_runs,
                             manifest.output_dir);
    return summary.exit_status();
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return 1;
  }
}
