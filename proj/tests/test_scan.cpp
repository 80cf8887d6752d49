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

#include "ofprint/scan.hpp"

#include "support.hpp"

#include "json.hpp"

using namespace ofp;
using ofp::test::db;
using ofp::test::model_of;

namespace {

ScanResult scan(const char* id, NoiseProfile profile, std::uint64_t seed, ScanOptions opt = {})
{
    auto cfg = make_scenario(model_of(id), profile);
    Simnet net(cfg, seed);
    std::set<MacAddress> sw(cfg.switch_macs.begin(), cfg.switch_macs.end());
    return run_scan(net.attacker(), {cfg.destination(), std::nullopt}, db(), opt, &sw);
}

} // namespace

TEST_CASE("full scan decides every shipped controller")
{
    for (const auto& sig : db()) {
        auto r = scan(sig.id.c_str(), NoiseProfile::Default, 7);
        REQUIRE_FALSE(r.verdict.ranking.empty());
        CHECK_MESSAGE(r.verdict.decided, sig.id);
        CHECK(r.verdict.ranking[0].id == sig.id);
        CHECK(r.verdict.evidence.size() == 4);
        CHECK(r.arp_rebroadcast == sig.arp_rebroadcast);
    }
}

TEST_CASE("single techniques")
{
    SUBCASE("processing time cannot split Beacon and Floodlight")
    {
        ScanOptions opt;
        opt.techniques = {Technique::ProcessingTime};
        auto r = scan("beacon", NoiseProfile::Default, 7, opt);
        CHECK_FALSE(r.verdict.decided);
        REQUIRE(r.verdict.ranking.size() >= 2);
        std::set<std::string> top2{r.verdict.ranking[0].id, r.verdict.ranking[1].id};
        CHECK(top2 == std::set<std::string>{"beacon", "floodlight"});
    }
    SUBCASE("timeouts alone leave the Ryu/ODL tie open")
    {
        ScanOptions opt;
        opt.techniques = {Technique::Timeout};
        opt.schedule.wait_cap = Seconds{60};
        auto r = scan("ryu", NoiseProfile::Default, 7, opt);
        CHECK_FALSE(r.verdict.decided);
        REQUIRE(r.timeouts);
        CHECK(r.timeouts->idle.is_infinite());
    }
    SUBCASE("ARP alone names Hydrogen")
    {
        ScanOptions opt;
        opt.techniques = {Technique::Arp};
        auto r = scan("opendaylight-hydrogen", NoiseProfile::Default, 7, opt);
        CHECK(r.verdict.decided);
        CHECK(r.verdict.ranking[0].id == "opendaylight-hydrogen");
    }
}

TEST_CASE("technique failures become empty evidence")
{
    auto cfg = make_scenario(model_of("pox"), NoiseProfile::Default);
    cfg.probe_destination = Ipv4Address::parse("10.0.0.200");
    Simnet net(cfg, 1);
    ScanOptions opt;
    opt.techniques = {Technique::Timeout, Technique::ProcessingTime};
    auto r = run_scan(net.attacker(), {cfg.destination(), std::nullopt}, db(), opt);
    CHECK(r.verdict.ranking.empty());
    CHECK_FALSE(r.verdict.decided);
    for (const auto& e : r.verdict.evidence) {
        CHECK(e.candidates.empty());
        CHECK_FALSE(e.notes.empty());
    }
}

TEST_CASE("transport failures propagate")
{
    auto cfg = make_scenario(model_of("pox"), NoiseProfile::Default);
    Simnet net(cfg, 1);
    net.attacker().set_down(true);
    CHECK_THROWS_AS(run_scan(net.attacker(), {cfg.destination(), std::nullopt}, db(), {}), Error);
}

TEST_CASE("scan options validation")
{
    ScanOptions opt;
    opt.techniques.clear();
    CHECK_THROWS_AS(opt.validate(), Error);
}

TEST_CASE("scan report is deterministic and complete")
{
    auto a = scan_report_json(scan("floodlight", NoiseProfile::Noisy, 4), {"floodlight@noisy", 4});
    auto b = scan_report_json(scan("floodlight", NoiseProfile::Noisy, 4), {"floodlight@noisy", 4});
    CHECK(a == b);
    auto doc = nlohmann::json::parse(a);
    CHECK(doc["version"] == 1);
    CHECK(doc["kind"] == "scan-report");
    CHECK(doc["source"] == "floodlight@noisy");
    for (const char* key : {"decided", "top", "ranking", "evidence", "measurements"})
        CHECK_MESSAGE(doc.contains(key), key);
    CHECK(doc["measurements"].contains("baseline"));
}

TEST_CASE("build_database recovers processing records and merges")
{
    SignatureDatabase d = db();
    ProbeSchedule s;
    std::vector<ScenarioConfig> targets;
    for (const char* id : {"pox", "ryu"})
        targets.push_back(make_scenario(model_of(id), NoiseProfile::Minimal));
    auto custom = test::custom_model("nox-like", test::secs(4), Timeout::infinite(), 12.0);
    targets.push_back(make_scenario(custom, NoiseProfile::Minimal));

    auto outcomes = build_database(d, targets, s, 1);
    REQUIRE(outcomes.size() == 3);
    for (const auto& o : outcomes)
        CHECK_MESSAGE(!o.error, o.target);
    CHECK(d.size() == 7);
    CHECK(std::abs(find_signature(d, "pox")->processing.t_p_adjusted.count() - 33.439) <= 0.3);
    auto* added = find_signature(d, "nox-like");
    REQUIRE(added);
    CHECK(std::abs(added->processing.t_p_adjusted.count() - 12.0) <= 0.3);
    CHECK(added->timeouts.idle == test::secs(4));
    // Timeouts and LLDP of merged entries are untouched.
    CHECK(find_signature(d, "pox")->lldp == find_signature(db(), "pox")->lldp);

    auto again = d;
    build_database(again, targets, s, 1);
    CHECK(again == d);

    auto report = nlohmann::json::parse(build_report_json(outcomes));
    CHECK(report["kind"] == "build-report");
}

TEST_CASE("build_database collects per-target errors")
{
    SignatureDatabase d = db();
    auto bad = make_scenario(model_of("pox"), NoiseProfile::Minimal);
    bad.probe_destination = Ipv4Address::parse("10.0.0.200");
    std::vector<ScenarioConfig> targets{bad, make_scenario(model_of("ryu"), NoiseProfile::Minimal)};
    auto outcomes = build_database(d, targets, {}, 1);
    REQUIRE(outcomes.size() == 2);
    CHECK(outcomes[0].error);
    CHECK_FALSE(outcomes[1].error);
}
