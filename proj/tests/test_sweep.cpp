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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bidsim/experiment.hpp"
#include "bidsim/report.hpp"
#include "bidsim/sweep.hpp"

using namespace bidsim;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.k_values = {1, 2, 4, 8};
  cfg.runs_per_k = 3;
  return cfg;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "bidsim_sweep" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("jobs come out k ascending, seeds ascending") {
    ScenarioConfig cfg;
    cfg.k_values = {4, 1, 4};
    cfg.runs_per_k = 2;
    const auto jobs = sweep_jobs(cfg);
    REQUIRE(jobs.size() == 4);
    CHECK(jobs[0].k == 1);
    CHECK(jobs[0].seed == 0);
    CHECK(jobs[1].seed == 1);
    CHECK(jobs[3].k == 4);
  }

  TEST_CASE("parallel sweep reproduces the serial reference exactly") {
    const auto cfg = small_config();
    RunOptions opt;
    opt.capture_trace = true;
    const auto serial = run_sweep_serial(cfg, opt);
    for (int threads : {1, 3, 8}) {
      const auto parallel = run_sweep_parallel(cfg, opt, threads);
      REQUIRE(parallel.size() == serial.size());
      for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(parallel[i].trace == serial[i].trace);
        CHECK(parallel[i].result.delta_t == serial[i].result.delta_t);
      }
      std::vector<RunResult> a, b;
      for (const auto& r : serial) a.push_back(r.result);
      for (const auto& r : parallel) b.push_back(r.result);
      CHECK(runs_csv(a) == runs_csv(b));
    }
  }

  TEST_CASE("CSV headers and row order") {
    const auto cfg = small_config();
    std::vector<RunResult> runs;
    for (const auto& art : run_sweep_serial(cfg)) runs.push_back(art.result);
    const auto rows = lines_of(runs_csv(runs));
    REQUIRE(rows.size() == 1 + runs.size());
    CHECK(rows[0] == "k,seed,mode,n,m,delta_t_s,tau_cfp,tau_mes,tau_s,tau_c,total_frames");
    CHECK(rows[1].starts_with("1,0,multicast,2,1,"));
    CHECK(rows.back().starts_with("8,2,multicast,16,8,"));

    const auto agg = lines_of(aggregate_csv(aggregate(runs, 1)));
    REQUIRE(agg.size() == 5);
    CHECK(agg[0] ==
          "k,psi_mean,delta_t_mean_s,delta_t_sd_s,tau_cfp_mean,tau_cfp_sd,tau_mes_mean,tau_mes_sd,tau_s_mean,"
          "tau_s_sd,tau_c_mean,tau_c_sd");
    CHECK(agg[1].starts_with("1,1"));
  }

  TEST_CASE("zero successes serialise tau_c as an empty cell") {
    RunResult r;
    r.k = 1;
    r.n = 2;
    r.m = 1;
    r.delta_t = 5.0;
    const auto rows = lines_of(runs_csv(std::span<const RunResult>(&r, 1)));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == "1,0,multicast,2,1,5.000,0.000000,0.000000,0.000000,,0");
    const auto agg = lines_of(aggregate_csv(aggregate(std::span<const RunResult>(&r, 1), 1)));
    CHECK(agg[1].ends_with(",,"));
  }

  TEST_CASE("a single run aggregates to psi 1") {
    ExperimentManifest m;
    m.config.k_values = {1};
    m.config.runs_per_k = 1;
    m.output_dir = scratch("single").string();
    const auto summary = run_experiment(m);
    CHECK(summary.exit_status() == 0);
    REQUIRE(summary.aggregates.size() == 1);
    CHECK(summary.aggregates[0].psi_vs_baseline == 1.0);
    CHECK(summary.aggregates[0].delta_t.sd == 0.0);
    CHECK(std::filesystem::exists(std::filesystem::path(m.output_dir) / "runs.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(m.output_dir) / "aggregate.csv"));
    CHECK_FALSE(std::filesystem::exists(std::filesystem::path(m.output_dir) / "psi.svg"));
  }

  TEST_CASE("repeated experiments write byte-identical files") {
    ExperimentManifest m;
    m.config = small_config();
    m.emit_traces = true;
    m.emit_plots = true;
    m.output_dir = scratch("first").string();
    const auto first = run_experiment(m);
    m.output_dir = scratch("second").string();
    const auto second = run_experiment(m, Executor::Serial);
    REQUIRE(first.written.size() == second.written.size());
    for (std::size_t i = 0; i < first.written.size(); ++i) {
      CHECK(first.written[i].filename() == second.written[i].filename());
      if (first.written[i].extension() == ".json") continue;  // records its own output dir
      CHECK(slurp(first.written[i]) == slurp(second.written[i]));
    }
  }

  TEST_CASE("runs that hit the safety cap are flagged and fail the experiment") {
    ExperimentManifest m;
    m.config.k_values = {1, 4};
    m.config.runs_per_k = 2;
    m.config.max_virtual_time_s = 6.0;
    m.output_dir = scratch("capped").string();
    const auto summary = run_experiment(m);
    CHECK(summary.failed_runs > 0);
    CHECK(summary.exit_status() == 1);
    const auto rows = lines_of(slurp(std::filesystem::path(m.output_dir) / "runs.csv"));
    REQUIRE(rows.size() == 1 + 4 + 1);
    CHECK(rows.back().starts_with("# FAILED "));
  }
}
