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

#include "bidsim/sweep.hpp"

#include <algorithm>

#include <omp.h>

#include <exception>

#include "bidsim/agents.hpp"

namespace bidsim {

RunResult collect_run_result(const Simulation& sim, int k, std::uint64_t seed, DiscoveryMode mode, double delta_t,
                             bool balanced, CostNormalization normalization) {
  RunResult r;
  r.k = k;
  r.seed = seed;
  r.mode = mode;
  r.n = static_cast<int>(sim.requesters().size());
  r.m = static_cast<int>(sim.providers().size());
  r.delta_t = delta_t;
  r.balanced = balanced;
  r.total_frames = sim.bus().frames_published();
  for (const auto& rt : sim.requesters()) {
    RequesterRecord rec;
    rec.aas_id = rt.profile.aas_id;
    rec.cfp_count = rt.cfp_count;
    rec.messages_sent = rt.messages_sent;
    rec.success = rt.result.has_value();
    if (rt.result) {
      rec.provider = rt.result->provider;
      rec.cost = rt.result->cost;
    }
    r.requesters.push_back(std::move(rec));
  }
  for (const auto& rt : sim.providers()) r.providers.push_back({rt.profile.aas_id, rt.messages_sent});
  r.taus = compute_taus(r.requesters, r.providers, normalization);
  return r;
}

RunArtifacts execute_run(const ScenarioConfig& cfg, int k, std::uint64_t seed, const RunOptions& options) {
  RunArtifacts art;
  const auto population = generate_population(cfg, k, seed);
  if (options.capture_population) art.population = dump_population(population);

  Simulation sim(population, simulation_options(cfg, seed));
  if (options.capture_trace) {
    sim.set_trace_sink([&art](const std::string& line) {
      art.trace += line;
      art.trace += '\n';
    });
  }
  const auto outcome = sim.run();
  const bool balanced = outcome.status == RunStatus::Balanced;
  art.result = collect_run_result(sim, k, seed, cfg.mode, outcome.t_end.seconds(), balanced,
                                  options.cost_normalization);
  return art;
}

std::vector<SweepJob> sweep_jobs(const ScenarioConfig& cfg) {
  std::vector<int> ks = cfg.k_values;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<SweepJob> jobs;
  for (int k : ks) {
    for (int s = 0; s < cfg.runs_per_k; ++s) jobs.push_back({k, static_cast<std::uint64_t>(s)});
  }
  return jobs;
}

std::vector<RunArtifacts> run_sweep_serial(const ScenarioConfig& cfg, const RunOptions& options) {
  validate(cfg);
  std::vector<RunArtifacts> out;
  for (const auto& job : sweep_jobs(cfg)) out.push_back(execute_run(cfg, job.k, job.seed, options));
  return out;
}

std::vector<RunArtifacts> run_sweep_parallel(const ScenarioConfig& cfg, const RunOptions& options, int jobs) {
  validate(cfg);
  const auto work = sweep_jobs(cfg);
  std::vector<RunArtifacts> out(work.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto count = static_cast<std::int64_t>(work.size());

  std::exception_ptr failure;

  // Walking backwards starts the largest k first.
  // Results land by index, not completion order.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = count - 1; i >= 0; --i) {
    const auto& job = work[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = execute_run(cfg, job.k, job.seed, options);
    } catch (...) {
#pragma omp critical(bidsim_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace bidsim
