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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidsim/protocol.hpp"

namespace bidsim {

/// How the cost metric is normalised. PerSuccess divides the summed realised
/// cost by the success count s; Printed divides by the success rate s/n.
enum class CostNormalization { PerSuccess, Printed };

std::string_view to_string(CostNormalization normalization);
std::optional<CostNormalization> parse_cost_normalization(std::string_view text);

struct RequesterRecord {
  std::string aas_id;
  int cfp_count = 0;
  std::uint64_t messages_sent = 0;
  bool success = false;
  std::optional<std::string> provider;  // allocation entry
  std::optional<double> cost;
};

struct ProviderRecord {
  std::string aas_id;
  std::uint64_t messages_sent = 0;
};

struct Taus {
  double cfp = 0.0;
  double mes = 0.0;
  double s = 0.0;
  std::optional<double> c;
};

struct RunResult {
  int k = 0;
  std::uint64_t seed = 0;
  DiscoveryMode mode = DiscoveryMode::Multicast;
  int n = 0;
  int m = 0;
  double delta_t = 0.0;  // virtual seconds
  bool balanced = true;
  std::uint64_t total_frames = 0;
  std::vector<RequesterRecord> requesters;
  std::vector<ProviderRecord> providers;
  Taus taus;
};

Taus compute_taus(std::span<const RequesterRecord> requesters, std::span<const ProviderRecord> providers,
                  CostNormalization normalization = CostNormalization::PerSuccess);

/// Ratio of F = lambda / (C * QoS) at scale 2 over scale 1. Throws on non-positive input.
double compute_psi(double lambda1, double cost1, double qos1, double lambda2, double cost2, double qos2);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // (n - 1) denominator, 0 for a single sample
};

/// Sample mean and standard deviation; throws on an empty sample.
MeanSd mean_sd(std::span<const double> values);

struct AggregateResult {
  int k = 0;
  int runs = 0;
  double psi_vs_baseline = 0.0;
  MeanSd delta_t;
  MeanSd tau_cfp;
  MeanSd tau_mes;
  MeanSd tau_s;
  std::optional<MeanSd> tau_c;  // over runs with at least one success
};

/// Groups runs by k (ascending) and computes psi against the group of `baseline_k`.
std::vector<AggregateResult> aggregate(std::span<const RunResult> runs, int baseline_k);

}  // namespace bidsim
