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

#include "bidsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace bidsim {

std::vector<std::string> config_violations(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, std::string_view field, std::string_view what) {
    if (!ok) errors.push_back(fmt::format("{}: {}", field, what));
  };
  auto require_range = [&](const IntRange& r, std::string_view field) {
    require(r.lo <= r.hi, field, "range is empty (lo > hi)");
  };

  require(!cfg.k_values.empty(), "k_values", "must not be empty");
  for (int k : cfg.k_values) require(k >= 1, "k_values", fmt::format("k must be >= 1, got {}", k));
  require(cfg.runs_per_k >= 1, "runs_per_k", "must be >= 1");
  require(cfg.service_alphabet_size >= 1, "service_alphabet_size", "must be >= 1");
  require(cfg.mu_cost > 0, "mu_cost", "must be > 0");
  require(cfg.sigma_cost > 0, "sigma_cost", "must be > 0");
  require(cfg.budget_factor > 0, "budget_factor", "must be > 0");
  require(cfg.sigma_budget > 0, "sigma_budget", "must be > 0");
  require(cfg.mu_duration > 0, "mu_duration", "must be > 0");
  require(cfg.sigma_duration > 0, "sigma_duration", "must be > 0");
  require(cfg.t_exp > 0, "t_exp", "must be > 0");
  require_range(cfg.q_req_range, "q_req_range");
  require_range(cfg.q_out_range, "q_out_range");
  require_range(cfg.capability_count_range, "capability_count_range");
  require(cfg.capability_count_range.lo >= 1, "capability_count_range", "lower bound must be >= 1");
  require(cfg.capability_count_range.hi <= cfg.service_alphabet_size, "capability_count_range",
          "upper bound exceeds service_alphabet_size");
  require(cfg.retry_jitter_max_ms >= 0, "retry_jitter_max_ms", "must be >= 0");
  require(cfg.network_latency_ms >= 0, "network_latency_ms", "must be >= 0");
  require(cfg.max_rounds >= 1, "max_rounds", "must be >= 1");
  require(cfg.max_virtual_time_s > 0, "max_virtual_time_s", "must be > 0");
  return errors;
}

void validate(const ScenarioConfig& cfg) {
  const auto errors = config_violations(cfg);
  if (errors.empty()) return;
  std::string message = "invalid scenario config:";
  for (const auto& e : errors) message += "\n  " + e;
  throw std::invalid_argument(message);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = splitmix64(static_cast<std::uint64_t>(kVersion));
  for (std::uint64_t part : path) key = splitmix64(key ^ splitmix64(part));
  return RandomStream(key);
}

double RandomStream::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double RandomStream::normal(double mu, double sigma) {
  double u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::normal_at_least(double mu, double sigma, double floor) {
  double x;
  do {
    x = normal(mu, sigma);
  } while (x < floor);
  return x;
}

RandomStream agent_stream(std::uint64_t master_seed, int k, std::uint64_t run, StreamRole role, std::size_t index,
                          StreamPurpose purpose) {
  return RandomStream::derive({master_seed, static_cast<std::uint64_t>(k), run, static_cast<std::uint64_t>(role),
                               static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(purpose)});
}

std::string provider_id(std::size_t index) { return fmt::format("sp-{:04d}", index + 1); }
std::string requester_id(std::size_t index) { return fmt::format("sr-{:04d}", index + 1); }

GeneratedPopulation generate_population(const ScenarioConfig& cfg, int k, std::uint64_t seed) {
  validate(cfg);
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  GeneratedPopulation pop;
  pop.k = k;
  pop.seed = seed;
  const auto m = static_cast<std::size_t>(k);
  const auto n = 2 * m;
  const auto t_exp = SimDuration::from_seconds(cfg.t_exp);
  const auto alphabet = service_alphabet(cfg.service_alphabet_size);

  pop.providers.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto rng = agent_stream(cfg.master_seed, k, seed, StreamRole::Provider, i, StreamPurpose::Profile);
    ProviderProfile sp;
    sp.aas_id = provider_id(i);

    const auto count = rng.uniform_int(cfg.capability_count_range.lo, cfg.capability_count_range.hi);
    std::vector<int> order(alphabet.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::int64_t c = 0; c < count; ++c) {
      const auto pick = rng.uniform_int(c, static_cast<std::int64_t>(order.size()) - 1);
      std::swap(order[static_cast<std::size_t>(c)], order[static_cast<std::size_t>(pick)]);
    }
    order.resize(static_cast<std::size_t>(count));
    std::sort(order.begin(), order.end());
    for (int idx : order) sp.capabilities.push_back(alphabet[static_cast<std::size_t>(idx)]);

    sp.cost = rng.normal_at_least(cfg.mu_cost, cfg.sigma_cost, kMinCost);
    sp.duration = SimDuration::from_seconds(rng.normal_at_least(cfg.mu_duration, cfg.sigma_duration, kMinDurationSeconds));
    sp.quality_out = static_cast<int>(rng.uniform_int(cfg.q_out_range.lo, cfg.q_out_range.hi));
    sp.t_exp = t_exp;
    pop.providers.push_back(std::move(sp));
  }

  pop.requesters.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto rng = agent_stream(cfg.master_seed, k, seed, StreamRole::Requester, j, StreamPurpose::Profile);
    RequesterProfile sr;
    sr.aas_id = requester_id(j);
    sr.requested = alphabet[static_cast<std::size_t>(rng.uniform_int(0, cfg.service_alphabet_size - 1))];
    sr.budget = rng.normal_at_least(cfg.budget_factor * cfg.mu_cost, cfg.sigma_budget, kMinBudget);
    sr.quality_req = static_cast<int>(rng.uniform_int(cfg.q_req_range.lo, cfg.q_req_range.hi));
    sr.t_exp = t_exp;
    pop.requesters.push_back(std::move(sr));
  }
  return pop;
}

std::string dump_population(const GeneratedPopulation& population) {
  std::string out;
  for (const auto& sp : population.providers) {
    nlohmann::ordered_json rec;
    rec["aas_id"] = sp.aas_id;
    rec["role"] = "provider";
    std::vector<std::string> caps;
    for (const auto& c : sp.capabilities) caps.push_back(c.id());
    rec["capabilities"] = caps;
    rec["cost"] = sp.cost;
    rec["duration_ms"] = sp.duration.millis();
    rec["quality_out"] = sp.quality_out;
    rec["t_exp_ms"] = sp.t_exp.millis();
    out += rec.dump() + "\n";
  }
  for (const auto& sr : population.requesters) {
    nlohmann::ordered_json rec;
    rec["aas_id"] = sr.aas_id;
    rec["role"] = "requester";
    rec["requested"] = sr.requested.id();
    rec["budget"] = sr.budget;
    rec["quality_req"] = sr.quality_req;
    rec["t_exp_ms"] = sr.t_exp.millis();
    out += rec.dump() + "\n";
  }
  return out;
}

}  // namespace bidsim
