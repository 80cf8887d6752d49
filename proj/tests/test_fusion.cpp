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

#include "ofprint/fusion.hpp"

#include "support.hpp"

#include <cmath>

using namespace ofp;
using ofp::test::db;

namespace {

double score_of(const FingerprintVerdict& v, const std::string& id)
{
    for (const auto& r : v.ranking)
        if (r.id == id)
            return r.score;
    return -1;
}

} // namespace

TEST_CASE("timeout pair plus companion LLDP decides floodlight")
{
    std::vector<TechniqueEvidence> ev = {
        make_evidence(Technique::Timeout, {"floodlight", "beacon"}),
        make_evidence(Technique::Lldp, {"floodlight"}),
    };
    auto v = combine(ev, db());
    REQUIRE_FALSE(v.ranking.empty());
    CHECK(v.decided);
    CHECK(v.ranking[0].id == "floodlight");
}

TEST_CASE("ARP evidence breaks the Ryu/OpenDaylight timeout tie")
{
    std::vector<TechniqueEvidence> ev = {
        make_evidence(Technique::Timeout,
                      {"ryu", "opendaylight-lithium-helium", "opendaylight-hydrogen"}),
        make_arp_evidence(true, db()),
    };
    auto v = combine(ev, db());
    CHECK(v.decided);
    CHECK(v.ranking[0].id == "opendaylight-hydrogen");
}

TEST_CASE("positive ARP forces Hydrogen first even against other evidence")
{
    std::vector<TechniqueEvidence> ev = {
        make_evidence(Technique::Timeout, {"pox"}),
        make_evidence(Technique::ProcessingTime, {"pox"}),
        make_arp_evidence(true, db()),
    };
    auto v = combine(ev, db());
    CHECK(v.ranking[0].id == "opendaylight-hydrogen");
}

TEST_CASE("a lone empty technique yields an empty, undecided verdict")
{
    std::vector<TechniqueEvidence> ev = {make_evidence(Technique::Timeout, {})};
    auto v = combine(ev, db());
    CHECK(v.ranking.empty());
    CHECK_FALSE(v.decided);
    CHECK(v.evidence.size() == 1);
}

TEST_CASE("scores follow the product rule")
{
    // Independent oracle: two candidates sharing a timeout set at 0.9,
    // one also named by LLDP at 1.0. Unscored members share the mass
    // equally, absent ones take the 0.05 penalty.
    std::vector<TechniqueEvidence> ev = {
        make_evidence(Technique::Timeout, {"floodlight", "beacon"}),
        make_evidence(Technique::Lldp, {"floodlight"}),
    };
    auto v = combine(ev, db());
    const double eps = 0.05;
    auto raw = [&](double t, double l) { return std::pow(t, 0.9) * std::pow(l, 1.0); };
    double fl = raw(0.5, 1.0), be = raw(0.5, eps), other = raw(eps, eps);
    double total = fl + be + 4 * other;
    CHECK(score_of(v, "floodlight") == doctest::Approx(fl / total));
    CHECK(score_of(v, "beacon") == doctest::Approx(be / total));
    CHECK(score_of(v, "ryu") == doctest::Approx(other / total));
    double sum = 0;
    for (const auto& r : v.ranking)
        sum += r.score;
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("explicit scores override the equal split")
{
    TechniqueEvidence e;
    e.technique = Technique::ProcessingTime;
    e.confidence = 1.0;
    e.candidates = {{"beacon", 0.7}, {"floodlight", 0.2}};
    std::vector<TechniqueEvidence> ev{e};
    auto v = combine(ev, db());
    REQUIRE(v.ranking.size() == 6);
    CHECK(v.ranking[0].id == "beacon");
    CHECK(v.ranking[1].id == "floodlight");
    CHECK(score_of(v, "beacon") / score_of(v, "floodlight") == doctest::Approx(3.5));
}

TEST_CASE("invalid evidence is rejected")
{
    TechniqueEvidence e = make_evidence(Technique::Timeout, {"pox"});
    e.confidence = 1.5;
    std::vector<TechniqueEvidence> ev{e};
    CHECK_THROWS_AS(combine(ev, db()), Error);

    TechniqueEvidence s;
    s.candidates = {{"pox", 0.8}, {"ryu", 0.4}};
    std::vector<TechniqueEvidence> ev2{s};
    CHECK_THROWS_AS(combine(ev2, db()), Error);
}

TEST_CASE("technique names")
{
    for (auto t : {Technique::Lldp, Technique::Timeout, Technique::ProcessingTime, Technique::Arp})
        CHECK(parse_technique(to_string(t)) == t);
    CHECK(parse_technique("processing_time") == Technique::ProcessingTime);
    CHECK_FALSE(parse_technique("dns"));
}
