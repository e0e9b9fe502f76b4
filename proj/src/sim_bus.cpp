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

#include "bidsim/sim_bus.hpp"

#include <stdexcept>

namespace bidsim {

SimBus::SimBus(BusConfig config) : config_(config) {
  if (config_.network_latency < SimDuration{0}) throw std::invalid_argument("network latency must be >= 0");
}

void SimBus::subscribe(std::string topic, EndpointId subscriber) {
  subscribers_[std::move(topic)].push_back(subscriber);
}

std::size_t SimBus::subscriber_count(const std::string& topic) const {
  const auto it = subscribers_.find(topic);
  return it == subscribers_.end() ? 0 : it->second.size();
}

void SimBus::push(SimTime fire_at, std::variant<Delivery, TimerFired> payload) {
  queue_.push(Event{fire_at, next_seq_++, std::move(payload)});
}

void SimBus::publish(EndpointId publisher, std::string topic, Frame frame) {
  if (publisher >= sent_by_.size()) sent_by_.resize(publisher + 1, 0);
  ++sent_by_[publisher];
  ++frames_published_;

  auto published = std::make_shared<const PublishedFrame>(PublishedFrame{std::move(topic), std::move(frame)});
  if (observer_) observer_(*published);

  const auto it = subscribers_.find(published->topic);
  if (it == subscribers_.end()) return;
  const SimTime at = now_ + config_.network_latency;
  for (EndpointId to : it->second) {
    push(at, Delivery{to, published});
    ++deliveries_enqueued_;
  }
}

TimerId SimBus::set_timer(EndpointId owner, SimTime fire_at, std::uint32_t tag) {
  if (fire_at < now_) throw std::invalid_argument("timer would fire in the past");
  const TimerId id = next_timer_++;
  pending_timers_.insert(id);
  push(fire_at, TimerFired{owner, id, tag});
  return id;
}

bool SimBus::cancel_timer(TimerId id) { return pending_timers_.erase(id) > 0; }

std::uint64_t SimBus::frames_published_by(EndpointId publisher) const {
  return publisher < sent_by_.size() ? sent_by_[publisher] : 0;
}

}  // namespace bidsim
