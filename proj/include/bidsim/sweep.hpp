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

#include <cstdint>
#include <string>
#include <vector>

#include "bidsim/metrics.hpp"
#include "bidsim/scenario.hpp"

namespace bidsim {

struct RunOptions {
  CostNormalization cost_normalization = CostNormalization::PerSuccess;
  bool capture_trace = false;
  bool capture_population = false;
};

struct RunArtifacts {
  RunResult result;
  std::string trace;       // one line per published frame
  std::string population;  // JSON lines, one per agent
};

/// Generates the population for (k, seed), simulates it and derives the run metrics.
RunArtifacts execute_run(const ScenarioConfig& cfg, int k, std::uint64_t seed, const RunOptions& options = {});

/// Builds a RunResult from a finished simulation's counters.
RunResult collect_run_result(const class Simulation& sim, int k, std::uint64_t seed, DiscoveryMode mode,
                             double delta_t, bool balanced, CostNormalization normalization);

struct SweepJob {
  int k = 0;
  std::uint64_t seed = 0;
};

/// (k, seed) pairs in output order: distinct k ascending, seeds ascending.
std::vector<SweepJob> sweep_jobs(const ScenarioConfig& cfg);

/// Reference implementation: one run after another.
std::vector<RunArtifacts> run_sweep_serial(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Same results as run_sweep_serial, with runs distributed over OpenMP threads.
/// `jobs` <= 0 uses the OpenMP default.
std::vector<RunArtifacts> run_sweep_parallel(const ScenarioConfig& cfg, const RunOptions& options = {}, int jobs = 0);

}  // namespace bidsim
