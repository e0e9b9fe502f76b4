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
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "bidsim/core_model.hpp"
#include "bidsim/protocol.hpp"

namespace bidsim {

struct IntRange {
  int lo = 0;
  int hi = 0;

  bool operator==(const IntRange&) const = default;
};

/// Stochastic scenario parameters. Defaults reproduce the published scenario.
struct ScenarioConfig {
  std::vector<int> k_values{1, 2, 4, 8, 16, 32, 64, 128, 256};
  int runs_per_k = 10;
  int service_alphabet_size = 5;
  double mu_cost = 10.0;
  double sigma_cost = 1.0;
  double budget_factor = 1.1;
  double sigma_budget = 1.0;
  double mu_duration = 20.0;  // seconds
  double sigma_duration = 2.0;
  double t_exp = 5.0;  // seconds
  IntRange q_req_range{0, 3};
  IntRange q_out_range{2, 5};
  IntRange capability_count_range{1, 3};
  DiscoveryMode mode = DiscoveryMode::Multicast;
  std::int64_t retry_jitter_max_ms = 1000;
  std::int64_t network_latency_ms = 0;
  int max_rounds = 1000;
  double max_virtual_time_s = 86400.0;
  std::uint64_t master_seed = 2025;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Every violated invariant, one message per problem, each naming its field.
std::vector<std::string> config_violations(const ScenarioConfig& cfg);

/// Throws std::invalid_argument listing all violations.
void validate(const ScenarioConfig& cfg);

/// Version 1: SplitMix64 key derivation feeding std::mt19937_64. Uniform reals
/// use the top 53 bits, integers use rejection sampling, normals use Box-Muller.
class RandomStream {
 public:
  static constexpr int kVersion = 1;

  explicit RandomStream(std::uint64_t key) : engine_(key) {}

  /// Independent stream for a key path such as (master_seed, k, run, role, index, purpose).
  static RandomStream derive(std::initializer_list<std::uint64_t> path);

  double uniform01();
  /// Uniform on [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal(double mu, double sigma);
  /// Normal draw, redrawn while below `floor`.
  double normal_at_least(double mu, double sigma, double floor);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

enum class StreamRole : std::uint64_t { Provider = 1, Requester = 2 };
enum class StreamPurpose : std::uint64_t { Profile = 1, RetryJitter = 2 };

RandomStream agent_stream(std::uint64_t master_seed, int k, std::uint64_t run, StreamRole role, std::size_t index,
                          StreamPurpose purpose);

inline constexpr double kMinCost = 0.01;
inline constexpr double kMinBudget = 0.01;
inline constexpr double kMinDurationSeconds = 0.1;

struct GeneratedPopulation {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<ProviderProfile> providers;   // m = k
  std::vector<RequesterProfile> requesters;  // n = 2k
};

std::string provider_id(std::size_t index);
std::string requester_id(std::size_t index);

/// Seeded realization of m = k providers and n = 2k requesters. `seed` is the run index.
GeneratedPopulation generate_population(const ScenarioConfig& cfg, int k, std::uint64_t seed);

/// One JSON object per line, one line per agent.
std::string dump_population(const GeneratedPopulation& population);

}  // namespace bidsim
