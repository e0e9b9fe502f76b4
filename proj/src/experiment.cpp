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

#include "bidsim/experiment.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "bidsim/report.hpp"
#include "bidsim/sweep.hpp"

namespace bidsim {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  written.push_back(path);
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentManifest& manifest, Executor executor) {
  validate(manifest.config);
  RunOptions options;
  options.cost_normalization = manifest.cost_normalization;
  options.capture_trace = manifest.emit_traces;
  options.capture_population = manifest.emit_population;

  auto artifacts = executor == Executor::Serial ? run_sweep_serial(manifest.config, options)
                                                : run_sweep_parallel(manifest.config, options, manifest.parallelism);

  ExperimentSummary summary;
  const std::filesystem::path dir(manifest.output_dir);
  std::filesystem::create_directories(dir);

  for (auto& art : artifacts) {
    if (!art.result.balanced) ++summary.failed_runs;
    const auto stem = fmt::format("k{}_seed{}", art.result.k, art.result.seed);
    if (manifest.emit_traces) {
      std::filesystem::create_directories(dir / "traces");
      write_file(dir / "traces" / (stem + ".log"), art.trace, summary.written);
    }
    if (manifest.emit_population) {
      std::filesystem::create_directories(dir / "population");
      write_file(dir / "population" / (stem + ".jsonl"), art.population, summary.written);
    }
    summary.runs.push_back(std::move(art.result));
  }

  write_file(dir / "runs.csv", runs_csv(summary.runs), summary.written);
  summary.aggregates = aggregate(summary.runs, manifest.config.k_values.front());
  write_file(dir / "aggregate.csv", aggregate_csv(summary.aggregates), summary.written);
  write_file(dir / "meta.json", run_metadata_json(manifest, summary.runs.size(), summary.failed_runs),
             summary.written);
  if (manifest.emit_plots) {
    write_file(dir / "psi.svg", psi_svg(summary.aggregates), summary.written);
    write_file(dir / "tau.svg", tau_svg(summary.aggregates), summary.written);
  }
  return summary;
}

}  // namespace bidsim
