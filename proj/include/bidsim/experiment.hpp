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

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "bidsim/config_io.hpp"
#include "bidsim/metrics.hpp"

namespace bidsim {

struct ExperimentSummary {
  std::vector<RunResult> runs;
  std::vector<AggregateResult> aggregates;
  std::size_t failed_runs = 0;
  std::vector<std::filesystem::path> written;

  [[nodiscard]] int exit_status() const { return failed_runs == 0 ? 0 : 1; }
};

enum class Executor { Parallel, Serial };

/// Runs every (k, seed) of the manifest, aggregates against the first k and
/// writes runs.csv, aggregate.csv, meta.json and the optional plots, traces
/// and population dumps under manifest.output_dir.
ExperimentSummary run_experiment(const ExperimentManifest& manifest, Executor executor = Executor::Parallel);

}  // namespace bidsim
