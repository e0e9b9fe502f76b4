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

#include <span>
#include <string>

#include "bidsim/config_io.hpp"
#include "bidsim/metrics.hpp"

namespace bidsim {

inline constexpr std::string_view kRunsCsvHeader =
    "k,seed,mode,n,m,delta_t_s,tau_cfp,tau_mes,tau_s,tau_c,total_frames";
inline constexpr std::string_view kAggregateCsvHeader =
    "k,psi_mean,delta_t_mean_s,delta_t_sd_s,tau_cfp_mean,tau_cfp_sd,tau_mes_mean,tau_mes_sd,tau_s_mean,tau_s_sd,"
    "tau_c_mean,tau_c_sd";

/// One row per run in the given order. Runs that did not balance are followed
/// by a trailing `# FAILED ...` marker line.
std::string runs_csv(std::span<const RunResult> runs);
std::string aggregate_csv(std::span<const AggregateResult> rows);

/// Psi over k on a log2 axis.
std::string psi_svg(std::span<const AggregateResult> rows);
/// The four tau curves over k (log2 x axis, log10 y axis).
std::string tau_svg(std::span<const AggregateResult> rows);

/// Provenance record written next to the CSVs.
std::string run_metadata_json(const ExperimentManifest& manifest, std::size_t runs, std::size_t failed);

}  // namespace bidsim
