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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidsim/core_model.hpp"
#include "bidsim/protocol.hpp"
#include "bidsim/scenario.hpp"
#include "bidsim/sim_bus.hpp"

namespace bidsim {

/// Minimum in-budget cost; ties go to the earliest arrival, then the smallest provider id.
std::optional<std::size_t> select_best_offer(std::span<const OfferSeen> offers, double budget);

/// Give up when a round saw no in-budget offer and no busy refusal, or after
/// max_rounds rounds. A provider Error is always retried (within max_rounds).
RoundDecision give_up_or_retry(const RoundOutcome& outcome, int max_rounds);

struct Allocation {
  std::string provider;
  double cost = 0.0;
};

struct RequesterRuntime {
  RequesterProfile profile;
  SrState state = sr::Idle{};
  int cfp_count = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_received = 0;
  int busy_refusals_this_round = 0;
  RandomStream retry_jitter_rng{0};
  std::optional<Allocation> result;
  std::optional<SimTime> finished_at;
};

struct WorkInterval {
  SimTime start;
  SimTime end;
  std::string requester;
};

struct ProviderRuntime {
  ProviderProfile profile;
  SpState state = sp::Listening{};
  ProviderTiming timing;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_received = 0;
  std::vector<WorkInterval> jobs;
};

enum class TimerKind : std::uint32_t { RoundStart = 0, CollectionDeadline = 1, WorkDone = 2 };

struct TimerRequest {
  SimTime at;
  TimerKind kind;
};

/// What an agent asks the bus to do after handling one input.
struct Emissions {
  std::vector<Outgoing> frames;
  std::vector<TimerRequest> timers;
};

struct AgentPolicy {
  DiscoveryMode mode = DiscoveryMode::Multicast;
  std::int64_t retry_jitter_max_ms = 1000;
  int max_rounds = 1000;
};

/// Opens the next negotiation round: one CFP plus the collection-deadline timer.
Emissions requester_round(RequesterRuntime& rt, const AgentPolicy& policy, SimTime now);

/// Deadline expiry or an incoming frame for a requester.
Emissions requester_on_deadline(RequesterRuntime& rt, const AgentPolicy& policy, SimTime now);
Emissions requester_on_frame(RequesterRuntime& rt, const AgentPolicy& policy, const Frame& frame, SimTime now);

Emissions provider_on_frame(ProviderRuntime& rt, const Frame& frame, SimTime now);
Emissions provider_on_work_done(ProviderRuntime& rt, SimTime now);

struct SimulationOptions {
  AgentPolicy policy;
  BusConfig bus;
  std::uint64_t master_seed = 0;
  std::uint64_t run = 0;  // selects the retry-jitter substreams
};

SimulationOptions simulation_options(const ScenarioConfig& cfg, std::uint64_t run);

/// One negotiation run over a fixed population. All agents start at t = 0.
class Simulation {
 public:
  Simulation(const GeneratedPopulation& population, const SimulationOptions& options);

  /// Called once per published frame with its formatted trace line.
  void set_trace_sink(std::function<void(const std::string&)> sink);
  void set_publish_observer(SimBus::PublishObserver observer);

  QuiescenceResult run();

  [[nodiscard]] const std::vector<ProviderRuntime>& providers() const { return providers_; }
  [[nodiscard]] const std::vector<RequesterRuntime>& requesters() const { return requesters_; }
  [[nodiscard]] const SimBus& bus() const { return bus_; }
  [[nodiscard]] bool balanced() const { return terminal_ == requesters_.size(); }

 private:
  void dispatch(const Delivery& delivery);
  void dispatch(const TimerFired& timer);
  void apply(EndpointId self, Emissions emissions);
  void note_terminal(RequesterRuntime& rt);

  [[nodiscard]] bool is_provider(EndpointId id) const { return id < providers_.size(); }
  RequesterRuntime& requester_at(EndpointId id) { return requesters_[id - providers_.size()]; }

  SimulationOptions options_;
  SimBus bus_;
  std::vector<ProviderRuntime> providers_;
  std::vector<RequesterRuntime> requesters_;
  std::size_t terminal_ = 0;
  bool started_ = false;
  std::function<void(const std::string&)> trace_;
  SimBus::PublishObserver observer_;
};

}  // namespace bidsim
