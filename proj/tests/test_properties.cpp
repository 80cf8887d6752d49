/*
 * Copyright 2026 The ofprint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "properties.hpp"

using namespace ofp;

namespace {

constexpr int kCases = 120;

void require_ok(const prop::Outcome& o)
{
    CHECK(o.cases >= 100);
    for (const auto& f : o.failures)
        FAIL_CHECK(f);
    CHECK(o.ok());
}

} // namespace

TEST_CASE("simnet traces are a function of config and seed")
{
    require_ok(prop::simnet_determinism(kCases, 0x5eed0001));
}

TEST_CASE("no forwarding through an expired entry, no early expiry")
{
    require_ok(prop::expiry_audit(kCases, 0x5eed0002));
}

TEST_CASE("LLDP serialize/parse round trip")
{
    require_ok(prop::lldp_round_trip(kCases, 0x5eed0003));
}

TEST_CASE("interval estimate is shift invariant")
{
    require_ok(prop::interval_shift_invariance(kCases, 0x5eed0004));
}

TEST_CASE("fusion ignores evidence order")
{
    require_ok(prop::fusion_order_independence(kCases, 0x5eed0005));
}

TEST_CASE("fusion keeps the leader when a set naming it is added")
{
    require_ok(prop::fusion_rank_monotonicity(kCases, 0x5eed0006));
}

TEST_CASE("LLDP classification has no false negatives on simulated profiles")
{
    require_ok(prop::lldp_no_false_negatives(kCases, 0x5eed0007));
}

TEST_CASE("single evidence item: ranking follows its scores")
{
    std::mt19937_64 rng(0x5eed0008);
    int cases = 0;
    for (int i = 0; i < kCases; ++i) {
        auto e = prop::random_evidence(rng);
        if (e.candidates.empty() || e.confidence == 0)
            continue;
        ++cases;
        std::vector<TechniqueEvidence> ev{e};
        auto v = combine(ev, test::db());
        // Oracle: per-candidate factor, absent ones at the 0.05 floor.
        double scored = 0;
        std::size_t unscored = 0;
        for (auto& [id, s] : e.candidates)
            s ? scored += *s : ++unscored;
        auto factor = [&](const std::string& id) {
            auto it = e.candidates.find(id);
            if (it == e.candidates.end())
                return 0.05;
            double f = it->second ? *it->second : std::max(0.0, 1 - scored) / unscored;
            return std::max(f, 0.05);
        };
        bool forced = e.technique == Technique::Arp && e.candidates.size() == 1 &&
                      e.candidates.begin()->first == "opendaylight-hydrogen";
        for (std::size_t k = 1; k < v.ranking.size() && !forced; ++k)
            CHECK(factor(v.ranking[k - 1].id) >= factor(v.ranking[k].id) - 1e-12);
    }
    CHECK(cases >= 50);
}
