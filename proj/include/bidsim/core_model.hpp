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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bidsim {

/// Virtual time in milliseconds since simulation start.
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(std::int64_t millis) : millis_(millis) {}

  static constexpr SimTime from_seconds(double seconds) {
    // Round half away from zero; inputs are non-negative.
    return SimTime(static_cast<std::int64_t>(seconds * 1000.0 + 0.5));
  }

  [[nodiscard]] constexpr std::int64_t millis() const { return millis_; }
  [[nodiscard]] constexpr double seconds() const { return static_cast<double>(millis_) / 1000.0; }

  constexpr SimTime operator+(SimTime rhs) const { return SimTime(millis_ + rhs.millis_); }
  constexpr SimTime operator-(SimTime rhs) const { return SimTime(millis_ - rhs.millis_); }
  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  std::int64_t millis_ = 0;
};

/// Durations share the millisecond representation of time points.
using SimDuration = SimTime;

/// Label of one service from the alphabet ("A", "B", ...).
class ServiceTag {
 public:
  ServiceTag() = default;
  explicit ServiceTag(std::string id) : id_(std::move(id)) {}

  /// The i-th tag of the alphabet: 0 -> "A", 25 -> "Z", 26 -> "S26".
  static ServiceTag from_index(int index);

  [[nodiscard]] const std::string& id() const { return id_; }
  auto operator<=>(const ServiceTag&) const = default;

 private:
  std::string id_;
};

/// The first `size` tags of the service alphabet.
std::vector<ServiceTag> service_alphabet(int size);
bool in_alphabet(const ServiceTag& tag, int alphabet_size);

struct ProviderProfile {
  std::string aas_id;
  std::vector<ServiceTag> capabilities;  // sorted, unique
  double cost = 0.0;
  SimDuration duration;
  int quality_out = 0;
  SimDuration t_exp;

  [[nodiscard]] bool offers(const ServiceTag& service) const;
};

struct RequesterProfile {
  std::string aas_id;
  ServiceTag requested;
  double budget = 0.0;
  int quality_req = 0;
  SimDuration t_exp;
};

/// Throws std::invalid_argument naming the first violated field.
void validate(const ProviderProfile& sp, int alphabet_size);
void validate(const RequesterProfile& sr, int alphabet_size);

/// Offer and agreement history a provider needs to judge its own actionability.
struct ProviderTiming {
  std::optional<SimTime> last_offer;
  std::optional<SimTime> agreement;
  std::optional<SimDuration> agreed_duration;
};

/// Requested service is offered and the delivered quality meets the requirement.
bool is_capable(const ProviderProfile& sp, const RequesterProfile& sr);

/// Capable and the provider's cost fits the requester's budget.
bool is_feasible(const ProviderProfile& sp, const RequesterProfile& sr);

/// Both timing conditions hold strictly: the last offer is older than t_exp and
/// the last agreed job has run longer than its duration. Absent history is vacuous.
/// Capability is checked separately, at call-for-proposal time.
bool is_actionable(const ProviderProfile& sp, const ProviderTiming& timing, SimTime now);

}  // namespace bidsim
