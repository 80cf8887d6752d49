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

// Scenario files. Example:
//
//   {
//     "version": 1,
//     "name": "pox-lab",
//     "controller": "pox",                       // or a full model object
//     "link": {"one_way_latency_ms": 1, "jitter_ms": 0.2, "loss_rate": 0},
//     "hosts": [{"name": "attacker", "ip": "10.0.0.1", "mac": "02:00:00:00:00:01"}, ...],
//     "switch_macs": ["00:11:22:33:44:55"],
//     "transit_hops": 0
//   }

#include "ofprint/simnet.hpp"

#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace ofp {

using namespace detail;

namespace {

ControllerModel parse_model(const ojson& v, const SignatureDatabase& db)
{
    const std::string where = "scenario.controller";
    if (v.is_string()) {
        auto id = resolve_controller_alias(v.get<std::string>(), db);
        if (!id)
            field_error(where, "unknown controller '" + v.get<std::string>() + "'");
        return ControllerModel::from_signature(*find_signature(db, *id));
    }
    if (!v.is_object())
        field_error(where, "must be a controller id or an object");
    reject_unknown_keys(v, {"id", "base", "processing_delay_ms", "processing_jitter_ms",
                            "idle_timeout_s", "hard_timeout_s", "lldp", "arp_rebroadcast"},
                        where);

    // "base" starts from a database entry; the remaining fields override it.
    ControllerModel m;
    if (auto it = v.find("base"); it != v.end()) {
        if (!it->is_string())
            field_error(where, "field 'base' must be a string");
        auto id = resolve_controller_alias(it->get<std::string>(), db);
        if (!id)
            field_error(where, "unknown base controller '" + it->get<std::string>() + "'");
        m = ControllerModel::from_signature(*find_signature(db, *id));
    } else {
        for (const char* key : {"processing_delay_ms", "idle_timeout_s", "hard_timeout_s", "lldp",
                                "arp_rebroadcast"})
            require(v, key, where);
    }
    if (auto it = v.find("id"); it != v.end()) {
        if (!it->is_string() || it->get<std::string>().empty())
            field_error(where, "field 'id' must be a non-empty string");
        m.id = it->get<std::string>();
    }
    if (v.contains("processing_delay_ms"))
        m.processing_delay = Millis{require_number(v, "processing_delay_ms", where)};
    if (v.contains("processing_jitter_ms"))
        m.processing_jitter = Millis{require_number(v, "processing_jitter_ms", where)};
    if (v.contains("idle_timeout_s"))
        m.idle = parse_timeout(v, "idle_timeout_s", where);
    if (v.contains("hard_timeout_s"))
        m.hard = parse_timeout(v, "hard_timeout_s", where);
    if (v.contains("lldp"))
        m.lldp = parse_lldp(v.at("lldp"), where + ".lldp");
    if (v.contains("arp_rebroadcast"))
        m.arp_rebroadcast = require_bool(v, "arp_rebroadcast", where);
    return m;
}

LinkModel parse_link(const ojson& v)
{
    const std::string where = "scenario.link";
    if (v.is_string()) {
        auto p = parse_noise_profile(v.get<std::string>());
        if (!p)
            field_error(where, "unknown noise profile '" + v.get<std::string>() + "'");
        return link_for(*p);
    }
    if (!v.is_object())
        field_error(where, "must be a profile name or an object");
    reject_unknown_keys(v, {"one_way_latency_ms", "jitter_ms", "loss_rate"}, where);
    LinkModel l;
    l.one_way_latency = Millis{require_number(v, "one_way_latency_ms", where)};
    if (v.contains("jitter_ms"))
        l.jitter = Millis{require_number(v, "jitter_ms", where)};
    if (v.contains("loss_rate"))
        l.loss_rate = require_number(v, "loss_rate", where);
    return l;
}

template <typename T, typename Parse>
T parse_text(const ojson& v, const std::string& where, Parse parse)
{
    if (!v.is_string())
        field_error(where, "must be a string");
    try {
        return parse(v.get<std::string>());
    } catch (const Error& e) {
        field_error(where, e.what());
    }
}

} // namespace

namespace {

ScenarioConfig build_scenario(const ojson& doc, const SignatureDatabase& db)
{
    const std::string where = "scenario";
    if (!doc.is_object())
        field_error(where, "top level must be an object");
    reject_unknown_keys(doc, {"version", "name", "controller", "link", "hosts", "switch_macs",
                              "transit_hops", "hop_latency_ms", "probe_destination",
                              "probe_timeout_s", "notes"},
                        where);
    const auto& version = require(doc, "version", where);
    if (!version.is_number_integer() || version.get<int>() != 1)
        field_error(where, "unsupported version (expected 1)");

    ControllerModel model = parse_model(require(doc, "controller", where), db);
    ScenarioConfig cfg = make_scenario(model, NoiseProfile::Default);
    if (auto it = doc.find("name"); it != doc.end()) {
        if (!it->is_string())
            field_error(where, "field 'name' must be a string");
        cfg.name = it->get<std::string>();
    }
    if (doc.contains("link"))
        cfg.link = parse_link(doc.at("link"));
    if (auto it = doc.find("hosts"); it != doc.end()) {
        if (!it->is_array())
            field_error(where, "field 'hosts' must be an array");
        cfg.hosts.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& h = (*it)[i];
            const std::string hw = "scenario.hosts[" + std::to_string(i) + "]";
            if (!h.is_object())
                field_error(hw, "must be an object");
            reject_unknown_keys(h, {"name", "ip", "mac"}, hw);
            HostConfig host;
            const auto& name = require(h, "name", hw);
            if (!name.is_string())
                field_error(hw, "field 'name' must be a string");
            host.name = name.get<std::string>();
            host.ip = parse_text<Ipv4Address>(require(h, "ip", hw), hw + ".ip", Ipv4Address::parse);
            host.mac = parse_text<MacAddress>(require(h, "mac", hw), hw + ".mac", MacAddress::parse);
            cfg.hosts.push_back(std::move(host));
        }
    }
    if (auto it = doc.find("switch_macs"); it != doc.end()) {
        if (!it->is_array())
            field_error(where, "field 'switch_macs' must be an array");
        cfg.switch_macs.clear();
        for (std::size_t i = 0; i < it->size(); ++i)
            cfg.switch_macs.push_back(parse_text<MacAddress>(
                (*it)[i], "scenario.switch_macs[" + std::to_string(i) + "]", MacAddress::parse));
    }
    if (auto it = doc.find("transit_hops"); it != doc.end()) {
        if (!it->is_number_integer())
            field_error(where, "field 'transit_hops' must be an integer");
        cfg.transit_hops = it->get<int>();
    }
    if (doc.contains("hop_latency_ms"))
        cfg.hop_latency = Millis{require_number(doc, "hop_latency_ms", where)};
    if (auto it = doc.find("probe_destination"); it != doc.end())
        cfg.probe_destination = parse_text<Ipv4Address>(*it, "scenario.probe_destination",
                                                        Ipv4Address::parse);
    if (doc.contains("probe_timeout_s"))
        cfg.probe_timeout = Seconds{require_number(doc, "probe_timeout_s", where)};

    cfg.validate();
    return cfg;
}

} // namespace

ScenarioConfig parse_scenario(std::string_view text, const SignatureDatabase& db)
{
    // Malformed text stays a parse error; anything wrong with the content
    // is an invalid configuration.
    ojson doc = parse_document(text, "scenario");
    try {
        return build_scenario(doc, db);
    } catch (const Error& e) {
        std::string what = e.what();
        if (what.rfind("scenario", 0) != 0)
            what = "scenario: " + what;
        throw Error(ErrorCode::InvalidConfig, what);
    }
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const SignatureDatabase& db)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open scenario '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str(), db);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

} // namespace ofp
