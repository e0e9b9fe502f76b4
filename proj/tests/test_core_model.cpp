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

#include <random>

#include "bidsim/core_model.hpp"
#include "test_support.hpp"

using namespace bidsim;
using bidsim::testing::provider;
using bidsim::testing::requester;

TEST_SUITE("core_model") {
  TEST_CASE("is_capable follows service membership and quality") {
    const auto sp = provider("sp-1", {"A", "B"}, 10.0, 20.0, 4);
    CHECK(is_capable(sp, requester("sr-1", "A", 11.0, 3)));
    CHECK_FALSE(is_capable(sp, requester("sr-1", "C", 11.0, 0)));
    CHECK_FALSE(is_capable(provider("sp-2", {"A"}, 10.0, 20.0, 2), requester("sr-1", "A", 11.0, 3)));
  }

  TEST_CASE("is_feasible adds the non-strict budget check") {
    const auto sr = requester("sr-1", "A", 11.0, 0);
    CHECK(is_feasible(provider("sp-1", {"A"}, 10.0, 20.0, 4), sr));
    CHECK_FALSE(is_feasible(provider("sp-1", {"A"}, 12.0, 20.0, 4), sr));
    CHECK(is_feasible(provider("sp-1", {"A"}, 11.0, 20.0, 4), sr));
  }

  TEST_CASE("is_actionable uses strict time comparisons") {
    const auto sp = provider("sp-1", {"A"}, 10.0, 20.0, 4);  // t_exp = 5 s

    ProviderTiming offered;
    offered.last_offer = SimTime::from_seconds(0);
    CHECK_FALSE(is_actionable(sp, offered, SimTime::from_seconds(4)));
    CHECK_FALSE(is_actionable(sp, offered, SimTime::from_seconds(5)));
    CHECK(is_actionable(sp, offered, SimTime{5001}));

    ProviderTiming working = offered;
    working.agreement = SimTime::from_seconds(0);
    working.agreed_duration = SimDuration::from_seconds(20);
    CHECK_FALSE(is_actionable(sp, working, SimTime::from_seconds(6)));
    CHECK_FALSE(is_actionable(sp, working, SimTime::from_seconds(20)));
    CHECK(is_actionable(sp, working, SimTime{20001}));

    CHECK(is_actionable(sp, ProviderTiming{}, SimTime{0}));
  }

  TEST_CASE("SimTime converts seconds exactly at millisecond resolution") {
    CHECK(SimTime::from_seconds(5).millis() == 5000);
    CHECK(SimTime::from_seconds(21.7).millis() == 21700);
    CHECK(SimTime::from_seconds(0.0004).millis() == 0);
    CHECK(SimTime{25000}.seconds() == doctest::Approx(25.0));
  }

  TEST_CASE("service alphabet") {
    const auto tags = service_alphabet(5);
    REQUIRE(tags.size() == 5);
    CHECK(tags.front().id() == "A");
    CHECK(tags.back().id() == "E");
    CHECK(in_alphabet(ServiceTag("C"), 5));
    CHECK_FALSE(in_alphabet(ServiceTag("F"), 5));
  }

  TEST_CASE("profile validation names the offending field") {
    auto sp = provider("sp-1", {"A"}, 10.0, 20.0, 4);
    CHECK_NOTHROW(validate(sp, 5));
    sp.cost = 0.0;
    CHECK_THROWS_WITH_AS(validate(sp, 5), doctest::Contains("cost"), std::invalid_argument);
    sp = provider("sp-1", {"A", "Z"}, 10.0, 20.0, 4);
    CHECK_THROWS_AS(validate(sp, 5), std::invalid_argument);

    auto sr = requester("sr-1", "A", 11.0, 0);
    CHECK_NOTHROW(validate(sr, 5));
    sr.budget = -1.0;
    CHECK_THROWS_WITH_AS(validate(sr, 5), doctest::Contains("budget"), std::invalid_argument);
  }

  TEST_CASE("property: feasible implies capable; predicates are pure") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> q(0, 6);
    std::uniform_real_distribution<double> money(5.0, 15.0);
    std::bernoulli_distribution coin(0.5);
    const auto alphabet = service_alphabet(5);
    for (int trial = 0; trial < 20000; ++trial) {
      std::vector<std::string> caps;
      for (const auto& t : alphabet) {
        if (coin(rng)) caps.push_back(t.id());
      }
      if (caps.empty()) caps.push_back("A");
      const auto sp = provider("sp", caps, money(rng), 20.0, q(rng));
      const auto sr = requester("sr", alphabet[static_cast<std::size_t>(q(rng)) % 5].id(), money(rng), q(rng));
      const bool feasible = is_feasible(sp, sr);
      if (feasible) REQUIRE(is_capable(sp, sr));
      REQUIRE(feasible == is_feasible(sp, sr));
      REQUIRE(is_capable(sp, sr) == is_capable(sp, sr));
    }
  }

  TEST_CASE("property: actionability is monotone in time for frozen history") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> t(0, 60000);
    const auto sp = provider("sp-1", {"A"}, 10.0, 20.0, 4);
    for (int trial = 0; trial < 5000; ++trial) {
      ProviderTiming timing;
      if (t(rng) % 3 != 0) timing.last_offer = SimTime{t(rng)};
      if (t(rng) % 2 == 0) {
        timing.agreement = SimTime{t(rng)};
        timing.agreed_duration = SimDuration{t(rng) % 30000 + 1};
      }
      bool seen_true = false;
      for (std::int64_t now = 0; now <= 120000; now += 250) {
        const bool a = is_actionable(sp, timing, SimTime{now});
        if (seen_true) REQUIRE(a);
        seen_true = seen_true || a;
        REQUIRE(a == is_actionable(sp, timing, SimTime{now}));
      }
    }
  }
}
