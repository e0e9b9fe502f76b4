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

#include "bidsim/agents.hpp"

#include <stdexcept>

namespace bidsim {

std::optional<std::size_t> select_best_offer(std::span<const OfferSeen> offers, double budget) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < offers.size(); ++i) {
    const auto& o = offers[i];
    if (o.cost > budget) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = offers[*best];
    if (o.cost < b.cost || (o.cost == b.cost && (o.arrival < b.arrival ||
                                                 (o.arrival == b.arrival && o.provider < b.provider)))) {
      best = i;
    }
  }
  return best;
}

RoundDecision give_up_or_retry(const RoundOutcome& outcome, int max_rounds) {
  if (outcome.round >= max_rounds) return RoundDecision::GiveUp;
  if (outcome.provider_error) return RoundDecision::Retry;
  if (outcome.in_budget_offers == 0 && outcome.busy_refusals == 0) return RoundDecision::GiveUp;
  return RoundDecision::Retry;
}

namespace {

void stamp(std::vector<Outgoing>& frames, std::uint64_t& messages_sent) {
  for (auto& o : frames) o.frame.message_seq = ++messages_sent;
}

SrStep step_requester(RequesterRuntime& rt, const AgentPolicy& policy, const SrInput& input, SimTime now) {
  const GiveUpRule rule = [max = policy.max_rounds](const RoundOutcome& o) { return give_up_or_retry(o, max); };
  const OfferSelector select = select_best_offer;
  const SrContext ctx{rt.profile, policy.mode, rule, select};
  return sr_transition(ctx, rt.state, input, now);
}

Emissions finish_requester_step(RequesterRuntime& rt, const AgentPolicy& policy, SrStep step, SimTime now) {
  rt.state = std::move(step.next);
  if (const auto* collecting = std::get_if<sr::Collecting>(&rt.state)) {
    rt.busy_refusals_this_round = collecting->busy_refusals;
  }
  if (const auto* done = std::get_if<sr::Succeeded>(&rt.state)) {
    rt.result = Allocation{done->provider, done->cost};
  }
  Emissions em;
  em.frames = std::move(step.out);
  stamp(em.frames, rt.messages_sent);
  if (step.decision == RoundDecision::Retry) {
    const auto jitter = rt.retry_jitter_rng.uniform_int(0, policy.retry_jitter_max_ms);
    em.timers.push_back({now + SimDuration{jitter}, TimerKind::RoundStart});
  }
  return em;
}

}  // namespace

Emissions requester_round(RequesterRuntime& rt, const AgentPolicy& policy, SimTime now) {
  if (!std::holds_alternative<sr::Idle>(rt.state)) return {};
  auto step = step_requester(rt, policy, sr_input::StartRound{rt.cfp_count + 1}, now);
  ++rt.cfp_count;
  rt.busy_refusals_this_round = 0;
  Emissions em = finish_requester_step(rt, policy, std::move(step), now);
  em.timers.push_back({std::get<sr::Collecting>(rt.state).deadline, TimerKind::CollectionDeadline});
  return em;
}

Emissions requester_on_deadline(RequesterRuntime& rt, const AgentPolicy& policy, SimTime now) {
  auto step = step_requester(rt, policy, sr_input::CollectionDeadline{}, now);
  return finish_requester_step(rt, policy, std::move(step), now);
}

Emissions requester_on_frame(RequesterRuntime& rt, const AgentPolicy& policy, const Frame& frame, SimTime now) {
  ++rt.messages_received;
  auto step = step_requester(rt, policy, sr_input::Received{frame}, now);
  return finish_requester_step(rt, policy, std::move(step), now);
}

namespace {

Emissions finish_provider_step(ProviderRuntime& rt, SpStep step, SimTime now) {
  rt.state = std::move(step.next);
  rt.timing = step.timing;
  Emissions em;
  em.frames = std::move(step.out);
  stamp(em.frames, rt.messages_sent);
  if (step.work_timer) {
    rt.jobs.push_back({now, *step.work_timer, std::get<sp::Working>(rt.state).requester});
    em.timers.push_back({*step.work_timer, TimerKind::WorkDone});
  }
  return em;
}

}  // namespace

Emissions provider_on_frame(ProviderRuntime& rt, const Frame& frame, SimTime now) {
  ++rt.messages_received;
  return finish_provider_step(rt, sp_transition(rt.state, rt.profile, rt.timing, sp_input::Received{frame}, now), now);
}

Emissions provider_on_work_done(ProviderRuntime& rt, SimTime now) {
  return finish_provider_step(rt, sp_transition(rt.state, rt.profile, rt.timing, sp_input::WorkDone{}, now), now);
}

// ---------------------------------------------------------------------------

SimulationOptions simulation_options(const ScenarioConfig& cfg, std::uint64_t run) {
  SimulationOptions opt;
  opt.policy.mode = cfg.mode;
  opt.policy.retry_jitter_max_ms = cfg.retry_jitter_max_ms;
  opt.policy.max_rounds = cfg.max_rounds;
  opt.bus.network_latency = SimDuration{cfg.network_latency_ms};
  opt.bus.max_virtual_time = SimTime::from_seconds(cfg.max_virtual_time_s);
  opt.master_seed = cfg.master_seed;
  opt.run = run;
  return opt;
}

Simulation::Simulation(const GeneratedPopulation& population, const SimulationOptions& options)
    : options_(options), bus_(options.bus) {
  providers_.reserve(population.providers.size());
  for (const auto& profile : population.providers) {
    ProviderRuntime rt;
    rt.profile = profile;
    providers_.push_back(std::move(rt));
  }
  requesters_.reserve(population.requesters.size());
  for (std::size_t j = 0; j < population.requesters.size(); ++j) {
    RequesterRuntime rt;
    rt.profile = population.requesters[j];
    rt.retry_jitter_rng = agent_stream(options.master_seed, population.k, options.run, StreamRole::Requester, j,
                                       StreamPurpose::RetryJitter);
    requesters_.push_back(std::move(rt));
  }

  for (std::size_t i = 0; i < providers_.size(); ++i) {
    const auto id = static_cast<EndpointId>(i);
    const auto& profile = providers_[i].profile;
    bus_.subscribe(topic_for_reply(profile.aas_id), id);
    if (options_.policy.mode == DiscoveryMode::Broadcast) {
      bus_.subscribe(topic_for_cfp(ServiceTag{}, DiscoveryMode::Broadcast), id);
    } else {
      for (const auto& service : profile.capabilities) bus_.subscribe(topic_for_cfp(service, DiscoveryMode::Multicast), id);
    }
  }
  for (std::size_t j = 0; j < requesters_.size(); ++j) {
    const auto id = static_cast<EndpointId>(providers_.size() + j);
    bus_.subscribe(topic_for_reply(requesters_[j].profile.aas_id), id);
  }
}

void Simulation::set_trace_sink(std::function<void(const std::string&)> sink) {
  trace_ = std::move(sink);
  bus_.set_publish_observer([this](const PublishedFrame& p) {
    if (trace_) trace_(format_trace_line(p.frame, p.topic));
    if (observer_) observer_(p);
  });
}

void Simulation::set_publish_observer(SimBus::PublishObserver observer) {
  observer_ = std::move(observer);
  bus_.set_publish_observer([this](const PublishedFrame& p) {
    if (trace_) trace_(format_trace_line(p.frame, p.topic));
    if (observer_) observer_(p);
  });
}

QuiescenceResult Simulation::run() {
  if (started_) throw std::logic_error("a Simulation runs once");
  started_ = true;
  for (std::size_t j = 0; j < requesters_.size(); ++j) {
    bus_.set_timer(static_cast<EndpointId>(providers_.size() + j), SimTime{0},
                   static_cast<std::uint32_t>(TimerKind::RoundStart));
  }
  return bus_.run_until_quiescent([this](const auto& event) { dispatch(event); }, [this] { return balanced(); });
}

void Simulation::dispatch(const Delivery& delivery) {
  const auto& frame = delivery.published->frame;
  const SimTime now = bus_.now();
  if (is_provider(delivery.to)) {
    apply(delivery.to, provider_on_frame(providers_[delivery.to], frame, now));
    return;
  }
  auto& rt = requester_at(delivery.to);
  apply(delivery.to, requester_on_frame(rt, options_.policy, frame, now));
  note_terminal(rt);
}

void Simulation::dispatch(const TimerFired& timer) {
  const SimTime now = bus_.now();
  const auto kind = static_cast<TimerKind>(timer.tag);
  if (is_provider(timer.owner)) {
    if (kind == TimerKind::WorkDone) apply(timer.owner, provider_on_work_done(providers_[timer.owner], now));
    return;
  }
  auto& rt = requester_at(timer.owner);
  if (kind == TimerKind::RoundStart) {
    apply(timer.owner, requester_round(rt, options_.policy, now));
  } else if (kind == TimerKind::CollectionDeadline) {
    apply(timer.owner, requester_on_deadline(rt, options_.policy, now));
  }
  note_terminal(rt);
}

void Simulation::apply(EndpointId self, Emissions emissions) {
  for (auto& out : emissions.frames) bus_.publish(self, std::move(out.topic), std::move(out.frame));
  for (const auto& t : emissions.timers) bus_.set_timer(self, t.at, static_cast<std::uint32_t>(t.kind));
}

void Simulation::note_terminal(RequesterRuntime& rt) {
  if (rt.finished_at || !is_terminal(rt.state)) return;
  rt.finished_at = bus_.now();
  ++terminal_;
}

}  // namespace bidsim
