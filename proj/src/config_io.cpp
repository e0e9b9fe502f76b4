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

#include "bidsim/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace bidsim {

namespace {

using json = nlohmann::json;

class Reader {
 public:
  Reader(const json& object, std::string prefix, std::vector<std::string>& errors)
      : object_(object), prefix_(std::move(prefix)), errors_(errors) {}

  ~Reader() {
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.contains(key)) errors_.push_back(fmt::format("{}{}: unknown key", prefix_, key));
    }
  }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "expected a number");
      }
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const auto* v = find(key)) {
      if (v->is_number_integer()) {
        out = v->get<Int>();
      } else {
        fail(key, "expected an integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(key, "expected true or false");
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(key, "expected a string");
      }
    }
  }

  void range(const std::string& key, IntRange& out) {
    if (const auto* v = find(key)) {
      if (v->is_array() && v->size() == 2 && (*v)[0].is_number_integer() && (*v)[1].is_number_integer()) {
        out = {(*v)[0].get<int>(), (*v)[1].get<int>()};
      } else {
        fail(key, "expected [lo, hi] integers");
      }
    }
  }

  void int_list(const std::string& key, std::vector<int>& out) {
    if (const auto* v = find(key)) {
      std::vector<int> values;
      bool ok = v->is_array();
      if (ok) {
        for (const auto& item : *v) {
          if (!item.is_number_integer()) {
            ok = false;
            break;
          }
          values.push_back(item.get<int>());
        }
      }
      if (ok) {
        out = std::move(values);
      } else {
        fail(key, "expected a list of integers");
      }
    }
  }

  void fail(const std::string& key, std::string_view what) {
    errors_.push_back(fmt::format("{}{}: {}", prefix_, key, what));
  }

 private:
  const json& object_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_scenario(const json& object, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  Reader r(object, "scenario.", errors);
  r.int_list("k_values", cfg.k_values);
  r.integer("runs_per_k", cfg.runs_per_k);
  r.integer("service_alphabet_size", cfg.service_alphabet_size);
  r.number("mu_cost", cfg.mu_cost);
  r.number("sigma_cost", cfg.sigma_cost);
  r.number("budget_factor", cfg.budget_factor);
  r.number("sigma_budget", cfg.sigma_budget);
  r.number("mu_duration", cfg.mu_duration);
  r.number("sigma_duration", cfg.sigma_duration);
  r.number("t_exp", cfg.t_exp);
  r.range("q_req_range", cfg.q_req_range);
  r.range("q_out_range", cfg.q_out_range);
  r.range("capability_count_range", cfg.capability_count_range);
  std::string mode(to_string(cfg.mode));
  r.string("mode", mode);
  if (auto parsed = parse_discovery_mode(mode)) {
    cfg.mode = *parsed;
  } else {
    r.fail("mode", "expected \"multicast\" or \"broadcast\"");
  }
  r.integer("retry_jitter_max_ms", cfg.retry_jitter_max_ms);
  r.integer("network_latency_ms", cfg.network_latency_ms);
  r.integer("max_rounds", cfg.max_rounds);
  r.number("max_virtual_time_s", cfg.max_virtual_time_s);
  r.integer("master_seed", cfg.master_seed);
}

}  // namespace

ManifestLoad parse_manifest(const std::string& text) {
  ManifestLoad load;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    load.errors.push_back(fmt::format("not valid JSON: {}", e.what()));
    return load;
  }
  if (!root.is_object()) {
    load.errors.push_back("manifest must be a JSON object");
    return load;
  }

  ExperimentManifest m;
  {
    Reader top(root, "", load.errors);
    if (const auto* scenario = top.find("scenario")) {
      if (scenario->is_object()) {
        read_scenario(*scenario, m.config, load.errors);
      } else {
        top.fail("scenario", "expected an object");
      }
    }
    if (const auto* output = top.find("output")) {
      if (output->is_object()) {
        Reader r(*output, "output.", load.errors);
        r.string("dir", m.output_dir);
        r.boolean("plots", m.emit_plots);
        r.boolean("traces", m.emit_traces);
        r.boolean("population", m.emit_population);
      } else {
        top.fail("output", "expected an object");
      }
    }
    top.integer("jobs", m.parallelism);
    std::string tau_c(to_string(m.cost_normalization));
    top.string("tau_c_normalization", tau_c);
    if (auto parsed = parse_cost_normalization(tau_c)) {
      m.cost_normalization = *parsed;
    } else {
      top.fail("tau_c_normalization", "expected \"per_success\" or \"printed\"");
    }
  }

  for (const auto& e : config_violations(m.config)) load.errors.push_back("scenario." + e);
  if (m.parallelism < 0) load.errors.push_back("jobs: must be >= 0");
  if (m.output_dir.empty()) load.errors.push_back("output.dir: must not be empty");
  if (load.errors.empty()) load.manifest = std::move(m);
  return load;
}

ManifestLoad validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ManifestLoad load;
    load.errors.push_back(fmt::format("cannot read {}", path.string()));
    return load;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

std::string manifest_to_json(const ExperimentManifest& m) {
  const auto& c = m.config;
  nlohmann::ordered_json scenario;
  scenario["k_values"] = c.k_values;
  scenario["runs_per_k"] = c.runs_per_k;
  scenario["service_alphabet_size"] = c.service_alphabet_size;
  scenario["mu_cost"] = c.mu_cost;
  scenario["sigma_cost"] = c.sigma_cost;
  scenario["budget_factor"] = c.budget_factor;
  scenario["sigma_budget"] = c.sigma_budget;
  scenario["mu_duration"] = c.mu_duration;
  scenario["sigma_duration"] = c.sigma_duration;
  scenario["t_exp"] = c.t_exp;
  scenario["q_req_range"] = {c.q_req_range.lo, c.q_req_range.hi};
  scenario["q_out_range"] = {c.q_out_range.lo, c.q_out_range.hi};
  scenario["capability_count_range"] = {c.capability_count_range.lo, c.capability_count_range.hi};
  scenario["mode"] = std::string(to_string(c.mode));
  scenario["retry_jitter_max_ms"] = c.retry_jitter_max_ms;
  scenario["network_latency_ms"] = c.network_latency_ms;
  scenario["max_rounds"] = c.max_rounds;
  scenario["max_virtual_time_s"] = c.max_virtual_time_s;
  scenario["master_seed"] = c.master_seed;

  nlohmann::ordered_json root;
  root["scenario"] = scenario;
  root["output"] = {{"dir", m.output_dir},
                    {"plots", m.emit_plots},
                    {"traces", m.emit_traces},
                    {"population", m.emit_population}};
  root["jobs"] = m.parallelism;
  root["tau_c_normalization"] = std::string(to_string(m.cost_normalization));
  return root.dump(2) + "\n";
}

}  // namespace bidsim
