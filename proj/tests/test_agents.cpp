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

#include <doctest.h>

#include <algorithm>
#include <map>

#include "bidsim/agents.hpp"
#include "test_support.hpp"

using namespace bidsim;
using namespace bidsim::testing;

namespace {

OfferSeen seen(std::string provider, double cost, std::uint64_t arrival) {
  return OfferSeen{std::move(provider), cost, SimDuration::from_seconds(20), 4, arrival};
}

RoundOutcome outcome(int in_budget, int over_budget, int busy, int permanent, int round = 1) {
  RoundOutcome o;
  o.round = round;
  o.in_budget_offers = in_budget;
  o.over_budget_offers = over_budget;
  o.busy_refusals = busy;
  o.permanent_refusals = permanent;
  return o;
}

RequesterRuntime requester_runtime(RequesterProfile profile, std::uint64_t jitter_key = 1) {
  RequesterRuntime rt;
  rt.profile = std::move(profile);
  rt.retry_jitter_rng = RandomStream(jitter_key);
  return rt;
}

}  // namespace

TEST_SUITE("agents") {
  TEST_CASE("select_best_offer") {
    const std::vector<OfferSeen> cheaper_second{seen("sp-0001", 10.0, 0), seen("sp-0002", 9.5, 1)};
    CHECK(select_best_offer(cheaper_second, 11.0) == 1u);

    const std::vector<OfferSeen> over{seen("sp-0001", 12.0, 0), seen("sp-0002", 11.5, 1)};
    CHECK_FALSE(select_best_offer(over, 11.0).has_value());

    const std::vector<OfferSeen> tie{seen("sp-0001", 10.0, 7), seen("sp-0002", 10.0, 3)};
    CHECK(select_best_offer(tie, 11.0) == 1u);

    const std::vector<OfferSeen> full_tie{seen("sp-0002", 10.0, 3), seen("sp-0001", 10.0, 3)};
    CHECK(select_best_offer(full_tie, 11.0) == 1u);

    const std::vector<OfferSeen> at_budget{seen("sp-0001", 11.0, 0)};
    CHECK(select_best_offer(at_budget, 11.0) == 0u);
    CHECK_FALSE(select_best_offer({}, 11.0).has_value());
  }

  TEST_CASE("give_up_or_retry") {
    CHECK(give_up_or_retry(outcome(0, 0, 2, 0), 1000) == RoundDecision::Retry);
    CHECK(give_up_or_retry(outcome(0, 0, 0, 1), 1000) == RoundDecision::GiveUp);
    CHECK(give_up_or_retry(outcome(0, 1, 0, 0), 1000) == RoundDecision::GiveUp);
    CHECK(give_up_or_retry(outcome(0, 0, 2, 0, 1000), 1000) == RoundDecision::GiveUp);
    RoundOutcome error;
    error.round = 3;
    error.provider_error = true;
    CHECK(give_up_or_retry(error, 1000) == RoundDecision::Retry);
    error.round = 1000;
    CHECK(give_up_or_retry(error, 1000) == RoundDecision::GiveUp);
  }

  TEST_CASE("requester_round publishes one CFP and arms the collection deadline") {
    auto rt = requester_runtime(requester("sr-0001", "A", 11.0, 0));
    const AgentPolicy policy;
    const auto em = requester_round(rt, policy, SimTime{0});
    REQUIRE(em.frames.size() == 1);
    CHECK(em.frames[0].frame.msg_type == MessageType::CallForProposal);
    CHECK(em.frames[0].frame.elements.reply_by == SimTime{5000});
    CHECK(em.frames[0].frame.message_seq == 1);
    REQUIRE(em.timers.size() == 1);
    CHECK(em.timers[0].at == SimTime{5000});
    CHECK(em.timers[0].kind == TimerKind::CollectionDeadline);
    CHECK(rt.cfp_count == 1);
    CHECK(rt.messages_sent == 1);
  }

  TEST_CASE("retry is scheduled at the deadline plus the drawn jitter; rounds are counted") {
    auto rt = requester_runtime(requester("sr-0001", "A", 11.0, 0), 99);
    const AgentPolicy policy;
    SimTime now{0};
    for (int round = 1; round <= 3; ++round) {
      requester_round(rt, policy, now);
      CHECK(rt.cfp_count == round);
      const auto deadline = std::get<sr::Collecting>(rt.state).deadline;
      const auto busy = refusal("sp-0001", "sr-0001", std::get<sr::Collecting>(rt.state).conversation,
                                RefusalReason::Busy, now);
      requester_on_frame(rt, policy, busy, now);
      CHECK(rt.busy_refusals_this_round == 1);

      auto oracle = rt.retry_jitter_rng;
      const auto expected_jitter = oracle.uniform_int(0, 1000);
      const auto em = requester_on_deadline(rt, policy, deadline);
      REQUIRE(em.timers.size() == 1);
      CHECK(em.timers[0].kind == TimerKind::RoundStart);
      CHECK(em.timers[0].at == deadline + SimDuration{expected_jitter});
      CHECK(std::holds_alternative<sr::Idle>(rt.state));
      now = em.timers[0].at;
    }
    CHECK(rt.cfp_count == 3);
    requester_round(rt, policy, now);
    CHECK(std::get<sr::Collecting>(rt.state).conversation == "sr-0001/4");
  }

  TEST_CASE("zero jitter retries at the deadline itself") {
    auto rt = requester_runtime(requester("sr-0001", "A", 11.0, 0));
    AgentPolicy policy;
    policy.retry_jitter_max_ms = 0;
    requester_round(rt, policy, SimTime{0});
    requester_on_frame(rt, policy, refusal("sp-0001", "sr-0001", "sr-0001/1", RefusalReason::Busy, SimTime{0}),
                       SimTime{0});
    const auto em = requester_on_deadline(rt, policy, SimTime{5000});
    REQUIRE(em.timers.size() == 1);
    CHECK(em.timers[0].at == SimTime{5000});
  }

  TEST_CASE("provider emits one Offer per actionable CFP and counts it") {
    ProviderRuntime rt;
    rt.profile = provider("sp-0001", {"A"}, 10.0, 20.0, 4);
    const auto em = provider_on_frame(rt, cfp("sr-0001", "A", 0, SimTime{0}), SimTime{0});
    REQUIRE(em.frames.size() == 1);
    CHECK(em.frames[0].frame.msg_type == MessageType::Offer);
    CHECK(rt.messages_sent == 1);
    CHECK(rt.messages_received == 1);
  }

  TEST_CASE("work timer expiry emits Conforming and frees the provider") {
    ProviderRuntime rt;
    rt.profile = provider("sp-0001", {"A"}, 10.0, 20.0, 4);
    provider_on_frame(rt, cfp("sr-0001", "A", 0, SimTime{0}), SimTime{0});
    const auto accept = plain(MessageType::OfferAcceptance, "sr-0001", "sp-0001", "sr-0001/1", SimTime{5000});
    const auto em = provider_on_frame(rt, accept, SimTime{5000});
    REQUIRE(em.timers.size() == 1);
    CHECK(em.timers[0].kind == TimerKind::WorkDone);
    CHECK(em.timers[0].at == SimTime{25000});
    REQUIRE(rt.jobs.size() == 1);
    CHECK(rt.jobs[0].start == SimTime{5000});
    CHECK(rt.jobs[0].end == SimTime{25000});

    const auto done = provider_on_work_done(rt, SimTime{25000});
    REQUIRE(done.frames.size() == 1);
    CHECK(done.frames[0].frame.msg_type == MessageType::Conforming);
    CHECK(done.frames[0].topic == "message/sr-0001");
    CHECK(std::holds_alternative<sp::Listening>(rt.state));
    CHECK(rt.messages_sent == 2);
  }

  TEST_CASE("two CFPs in the same millisecond: first published gets the offer, second a busy refusal") {
    Simulation sim(population({provider("sp-0001", {"A"}, 10.0, 20.0, 4)},
                              {requester("sr-0001", "A", 11.0, 0), requester("sr-0002", "A", 11.0, 0)}),
                   zero_jitter_options());
    std::vector<std::string> lines;
    sim.set_trace_sink([&](const std::string& l) { lines.push_back(l); });
    sim.run();
    REQUIRE(lines.size() >= 4);
    CHECK(lines[0].starts_with("t=0 cfp/A CallForProposal sr-0001->"));
    CHECK(lines[1].starts_with("t=0 cfp/A CallForProposal sr-0002->"));
    CHECK(lines[2].starts_with("t=0 message/sr-0001 Offer sp-0001->sr-0001"));
    CHECK(lines[3].starts_with("t=0 message/sr-0002 Refusal sp-0001->sr-0002"));
    CHECK(lines[3].ends_with("reason=busy"));
  }

  TEST_CASE("a Simulation runs only once") {
    Simulation sim(population({}, {}), zero_jitter_options());
    sim.run();
    CHECK_THROWS_AS(sim.run(), std::logic_error);
  }

  TEST_CASE("property: allocation validity, exclusive providers, message conservation, termination") {
    ScenarioConfig cfg;
    for (int k : {1, 2, 3, 5, 8, 16}) {
      for (std::uint64_t seed = 0; seed < 12; ++seed) {
        for (auto mode : {DiscoveryMode::Multicast, DiscoveryMode::Broadcast}) {
          cfg.mode = mode;
          cfg.retry_jitter_max_ms = seed % 3 == 0 ? 0 : 1000;
          const auto pop = generate_population(cfg, k, seed);
          Simulation sim(pop, simulation_options(cfg, seed));
          std::uint64_t observed = 0;
          std::map<std::string, int> cfps_seen;
          sim.set_publish_observer([&](const PublishedFrame& p) {
            ++observed;
            if (p.frame.msg_type == MessageType::CallForProposal) ++cfps_seen[p.frame.sender];
          });
          const auto r = sim.run();
          CAPTURE(k);
          CAPTURE(seed);
          REQUIRE(r.status == RunStatus::Balanced);
          REQUIRE(sim.balanced());

          std::map<std::string, const ProviderProfile*> by_id;
          for (const auto& p : pop.providers) by_id[p.aas_id] = &p;

          std::uint64_t sent = 0;
          for (const auto& sr : sim.requesters()) {
            sent += sr.messages_sent;
            REQUIRE(is_terminal(sr.state));
            REQUIRE(sr.cfp_count == cfps_seen[sr.profile.aas_id]);
            if (sr.result) {
              const auto* sp = by_id.at(sr.result->provider);
              REQUIRE(is_capable(*sp, sr.profile));
              REQUIRE(sr.result->cost <= sr.profile.budget);
              REQUIRE(sr.result->cost == sp->cost);
            }
            REQUIRE(sr.result.has_value() == std::holds_alternative<sr::Succeeded>(sr.state));
          }
          for (const auto& sp : sim.providers()) {
            sent += sp.messages_sent;
            auto jobs = sp.jobs;
            std::sort(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
            for (std::size_t i = 1; i < jobs.size(); ++i) REQUIRE(jobs[i - 1].end <= jobs[i].start);
            for (const auto& j : jobs) REQUIRE(j.end - j.start == sp.profile.duration);
          }
          REQUIRE(sent == sim.bus().frames_published());
          REQUIRE(sent == observed);
        }
      }
    }
  }
}
