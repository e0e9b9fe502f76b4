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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bidsim/metrics.hpp"
#include "bidsim/scenario.hpp"

namespace bidsim {

struct ExperimentManifest {
  ScenarioConfig config;
  std::string output_dir = "results";
  bool emit_plots = false;
  bool emit_traces = false;
  bool emit_population = false;
  int parallelism = 0;  // 0: OpenMP default
  CostNormalization cost_normalization = CostNormalization::PerSuccess;

  bool operator==(const ExperimentManifest&) const = default;
};

/// Either a manifest or every problem found, each naming its key.
struct ManifestLoad {
  std::optional<ExperimentManifest> manifest;
  std::vector<std::string> errors;

  [[nodiscard]] bool ok() const { return manifest.has_value(); }
};

/// Parses a JSON manifest. Absent keys keep their defaults, so "{}" is the
/// published scenario; unknown keys and invalid values are errors.
ManifestLoad parse_manifest(const std::string& text);
ManifestLoad validate_config(const std::filesystem::path& path);

/// Full manifest with every key spelled out; parse_manifest inverts it.
std::string manifest_to_json(const ExperimentManifest& manifest);

}  // namespace bidsim
