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

#include "support.hpp"

#include <algorithm>

using namespace ofp;
using ofp::test::db;

#ifndef OFPRINT_SOURCE_DIR
#error "OFPRINT_SOURCE_DIR must point at the source tree"
#endif

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ofp::Error");
    return ErrorCode::InvalidArgument;
}

std::string message_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const char* kPoxEntry = R"({
  "id": "pox", "idle_timeout_s": 10, "hard_timeout_s": 30,
  "t_p_ms": 34.266, "t_p_adjusted_ms": 33.439,
  "lldp": {"interval_s": 5, "interval_variable": true, "system_name_pattern": null,
           "system_description_pattern": "dpid:[MAC]", "companion_ethertype": null,
           "unknown_tlv_count": null},
  "arp_rebroadcast": false})";

} // namespace

TEST_CASE("shipped database covers the five controllers plus the Hydrogen variant")
{
    const auto& d = db();
    CHECK(d.size() == 6);
    std::set<std::string> ids;
    for (const auto& s : d)
        ids.insert(s.id);
    CHECK(ids == std::set<std::string>{"beacon", "floodlight", "opendaylight-hydrogen",
                                       "opendaylight-lithium-helium", "pox", "ryu"});
    CHECK(std::count_if(d.begin(), d.end(), [](auto& s) { return s.arp_rebroadcast; }) == 1);
    CHECK(find_signature(d, "opendaylight-hydrogen")->arp_rebroadcast);
}

TEST_CASE("shipped database file equals the built-in table")
{
    auto loaded = load_database(std::filesystem::path(OFPRINT_SOURCE_DIR) / "data/signatures.json");
    CHECK(loaded == db());
}

TEST_CASE("shipped values follow the published tables")
{
    auto* pox = find_signature(db(), "pox");
    REQUIRE(pox);
    CHECK(pox->timeouts.idle == Timeout::finite(Seconds{10}));
    CHECK(pox->timeouts.hard == Timeout::finite(Seconds{30}));
    CHECK(pox->processing.t_p.count() == doctest::Approx(34.266));
    CHECK(pox->processing.t_p_adjusted.count() == doctest::Approx(33.439));
    CHECK(pox->lldp.interval_variable);

    auto* fl = find_signature(db(), "floodlight");
    CHECK(fl->processing.t_p_adjusted.count() == doctest::Approx(2.627));
    CHECK(fl->lldp.companion_ethertype == kEthertypeBddp);
    auto* be = find_signature(db(), "beacon");
    CHECK(be->processing.t_p_adjusted.count() == doctest::Approx(2.370));
    CHECK(be->lldp.unknown_tlv_count == 2);
    auto* ryu = find_signature(db(), "ryu");
    CHECK(ryu->lldp.advisory());
    CHECK(ryu->lldp.interval == Seconds{1});
    auto* h = find_signature(db(), "opendaylight-hydrogen");
    CHECK(h->lldp.interval == Seconds{300});
    CHECK(h->lldp.system_name_pattern == "OF|[MAC]");
}

TEST_CASE("empty database with a valid header")
{
    CHECK(parse_database(R"({"version": 1, "signatures": []})").empty());
}

TEST_CASE("duplicate ids are rejected")
{
    std::string text = std::string(R"({"version": 1, "signatures": [)") + kPoxEntry + "," +
                       kPoxEntry + "]}";
    CHECK(code_of([&] { parse_database(text); }) == ErrorCode::DuplicateId);
    CHECK(message_of([&] { parse_database(text); }).find("pox") != std::string::npos);
}

TEST_CASE("parse errors carry context")
{
    SUBCASE("syntax error reports a line")
    {
        std::string text = "{\n  \"version\": 1,\n  \"signatures\": [,]\n}";
        CHECK(code_of([&] { parse_database(text); }) == ErrorCode::Parse);
        CHECK(message_of([&] { parse_database(text); }).find("line 3") != std::string::npos);
    }
    SUBCASE("unknown field is named")
    {
        std::string entry = kPoxEntry;
        entry.insert(entry.find("\"arp_rebroadcast\""), "\"colour\": 1, ");
        std::string text = std::string(R"({"version": 1, "signatures": [)") + entry + "]}";
        CHECK(code_of([&] { parse_database(text); }) == ErrorCode::Parse);
        CHECK(message_of([&] { parse_database(text); }).find("colour") != std::string::npos);
    }
    SUBCASE("wrong version")
    {
        CHECK(code_of([] { parse_database(R"({"version": 2, "signatures": []})"); }) ==
              ErrorCode::Parse);
    }
    SUBCASE("bad timeout string")
    {
        std::string entry = kPoxEntry;
        entry.replace(entry.find("30,"), 2, "\"forever\"");
        std::string text = std::string(R"({"version": 1, "signatures": [)") + entry + "]}";
        CHECK(message_of([&] { parse_database(text); }).find("hard_timeout_s") !=
              std::string::npos);
    }
    SUBCASE("missing file")
    {
        CHECK(code_of([] { load_database("/nonexistent/ofprint.json"); }) == ErrorCode::Io);
    }
}

TEST_CASE("infinite timeouts are written as a marker, not 0")
{
    auto text = serialize_database(db());
    CHECK(text.find("\"idle_timeout_s\": \"infinite\"") != std::string::npos);
    CHECK(text.find("\"idle_timeout_s\": 0") == std::string::npos);
}

TEST_CASE("save then load is the identity")
{
    test::TempDir dir;
    save_database(dir / "db.json", db());
    CHECK(load_database(dir / "db.json") == db());
}

TEST_CASE("match_timeouts examples")
{
    const Seconds tol{1};
    CHECK(match_timeouts(TimeoutDefaults{test::secs(10), test::secs(30)}, db(), tol) ==
          std::set<ControllerId>{"pox"});
    CHECK(match_timeouts(TimeoutDefaults{Timeout::infinite(), Timeout::infinite()}, db(), tol) ==
          std::set<ControllerId>{"ryu", "opendaylight-lithium-helium", "opendaylight-hydrogen"});
    CHECK(match_timeouts(TimeoutDefaults{test::secs(5), Timeout::infinite()}, db(), tol) ==
          std::set<ControllerId>{"floodlight", "beacon"});
    // Infinite never matches a finite value, however large.
    CHECK(match_timeouts(TimeoutDefaults{test::secs(5), test::secs(1e6)}, db(), tol).empty());
}

TEST_CASE("every entry matches its own timeouts at zero tolerance")
{
    for (const auto& sig : db())
        CHECK(match_timeouts(sig.timeouts, db(), Seconds{0}).count(sig.id) == 1);
}

TEST_CASE("match_processing_time examples")
{
    auto pox = match_processing_time(Millis{33.4}, db(), Millis{2});
    REQUIRE(pox.size() == 1);
    CHECK(pox[0].id == "pox");
    CHECK_FALSE(pox[0].ambiguous);

    auto two = match_processing_time(Millis{2.5}, db(), Millis{1});
    REQUIRE(two.size() == 2);
    std::set<std::string> ids{two[0].id, two[1].id};
    CHECK(ids == std::set<std::string>{"beacon", "floodlight"});
    CHECK(two[0].ambiguous);
    CHECK(two[1].ambiguous);

    CHECK(match_processing_time(Millis{100}, db(), Millis{2}).empty());
}

TEST_CASE("match_processing_time ordering is total")
{
    // Two entries at the same distance fall back to id order.
    SignatureDatabase d = {db()[0], db()[1]};
    d[0].id = "zeta";
    d[0].processing.t_p_adjusted = Millis{4};
    d[1].id = "alpha";
    d[1].processing.t_p_adjusted = Millis{6};
    auto m = match_processing_time(Millis{5}, d, Millis{2});
    REQUIRE(m.size() == 2);
    CHECK(m[0].id == "alpha");
    CHECK(m[1].id == "zeta");

    for (double x = 0; x < 40; x += 0.37) {
        auto r = match_processing_time(Millis{x}, db(), Millis{5});
        for (std::size_t i = 1; i < r.size(); ++i) {
            bool ordered = r[i - 1].distance < r[i].distance ||
                           (r[i - 1].distance == r[i].distance && r[i - 1].id < r[i].id);
            CHECK(ordered);
        }
    }
}

TEST_CASE("pattern language")
{
    CHECK(pattern_matches("openflow", "openflow"));
    CHECK_FALSE(pattern_matches("openflow", "openflow2"));
    CHECK(pattern_matches("OF|[MAC]", "OF|aa:bb:cc:dd:ee:ff"));
    CHECK(pattern_matches("OF|[MAC]", "OF|AA-BB-CC-DD-EE-FF"));
    CHECK(pattern_matches("OF|[MAC]", "OF|aabbccddeeff"));
    CHECK(pattern_matches("dpid:[MAC]", "dpid:00:11:22:33:44:55"));
    CHECK_FALSE(pattern_matches("dpid:[MAC]", "dpid:00:11:22:33:44"));
    CHECK_FALSE(pattern_matches("OF|[MAC]", "XX|aa:bb:cc:dd:ee:ff"));
    CHECK_FALSE(pattern_matches("OF|[MAC]", "OF|aa:bb:cc:dd:ee:ff:00"));
}

TEST_CASE("timeouts render as infinite or seconds")
{
    CHECK(to_string(Timeout::infinite()) == "infinite");
    CHECK(to_string(Timeout::finite(Seconds{10})).find("10") != std::string::npos);
}
