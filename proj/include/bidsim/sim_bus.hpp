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
#include <memory>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "bidsim/core_model.hpp"
#include "bidsim/protocol.hpp"

namespace bidsim {

/// Dense index of a bus participant within one run.
using EndpointId = std::uint32_t;
using TimerId = std::uint64_t;

struct BusConfig {
  SimDuration network_latency{0};
  SimTime max_virtual_time = SimTime::from_seconds(86400.0);
};

struct PublishedFrame {
  std::string topic;
  Frame frame;
};

struct Delivery {
  EndpointId to = 0;
  std::shared_ptr<const PublishedFrame> published;
};

struct TimerFired {
  EndpointId owner = 0;
  TimerId id = 0;
  std::uint32_t tag = 0;
};

struct Event {
  SimTime fire_at;
  std::uint64_t seq = 0;
  std::variant<Delivery, TimerFired> payload;
};

enum class RunStatus {
  Balanced,       // stop predicate became true
  QueueDrained,   // nothing left to do, predicate still false
  SafetyCapHit,   // next event lies beyond max_virtual_time
};

struct QuiescenceResult {
  SimTime t_end;
  RunStatus status = RunStatus::Balanced;
  std::uint64_t events_processed = 0;
};

/// Topic-based publish/subscribe over a virtual clock. Events are processed in
/// strict (fire_at, seq) order where seq is a global insertion counter.
class SimBus {
 public:
  using PublishObserver = std::function<void(const PublishedFrame&)>;

  explicit SimBus(BusConfig config = {});

  void subscribe(std::string topic, EndpointId subscriber);
  [[nodiscard]] std::size_t subscriber_count(const std::string& topic) const;

  /// Enqueues one delivery per current subscriber of `topic` at now + latency.
  /// Counts one sent frame for `publisher` regardless of fan-out.
  void publish(EndpointId publisher, std::string topic, Frame frame);

  /// Throws std::invalid_argument when fire_at lies in the past.
  TimerId set_timer(EndpointId owner, SimTime fire_at, std::uint32_t tag = 0);
  bool cancel_timer(TimerId id);

  void set_publish_observer(PublishObserver observer) { observer_ = std::move(observer); }

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] std::uint64_t frames_published() const { return frames_published_; }
  [[nodiscard]] std::uint64_t frames_published_by(EndpointId publisher) const;
  [[nodiscard]] std::uint64_t deliveries_enqueued() const { return deliveries_enqueued_; }
  [[nodiscard]] bool idle() const { return queue_.empty(); }

  /// Pops events in order and hands them to `handler` until `stop()` holds, the
  /// queue drains, or the safety cap is hit. `handler` is called as
  /// handler(const Delivery&) or handler(const TimerFired&).
  template <class Handler, class StopPredicate>
  QuiescenceResult run_until_quiescent(Handler&& handler, StopPredicate&& stop);

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  void push(SimTime fire_at, std::variant<Delivery, TimerFired> payload);

  BusConfig config_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  TimerId next_timer_ = 1;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_map<std::string, std::vector<EndpointId>> subscribers_;
  std::unordered_set<TimerId> pending_timers_;
  std::vector<std::uint64_t> sent_by_;
  std::uint64_t frames_published_ = 0;
  std::uint64_t deliveries_enqueued_ = 0;
  PublishObserver observer_;
};

template <class Handler, class StopPredicate>
QuiescenceResult SimBus::run_until_quiescent(Handler&& handler, StopPredicate&& stop) {
  QuiescenceResult result;
  result.t_end = now_;
  if (stop()) return result;

  while (!queue_.empty()) {
    if (const auto* timer = std::get_if<TimerFired>(&queue_.top().payload);
        timer && !pending_timers_.contains(timer->id)) {
      queue_.pop();  // cancelled
      continue;
    }
    if (queue_.top().fire_at > config_.max_virtual_time) {
      result.status = RunStatus::SafetyCapHit;
      result.t_end = now_;
      return result;
    }
    Event event = queue_.top();
    queue_.pop();
    if (const auto* timer = std::get_if<TimerFired>(&event.payload)) pending_timers_.erase(timer->id);
    now_ = event.fire_at;
    ++result.events_processed;
    std::visit([&](const auto& payload) { handler(payload); }, event.payload);
    if (stop()) {
      result.t_end = now_;
      return result;
    }
  }
  result.status = RunStatus::QueueDrained;
  result.t_end = now_;
  return result;
}

}  // namespace bidsim
