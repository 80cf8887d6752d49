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

#include "ofprint/signatures.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ofp {

using namespace detail;

namespace {

ControllerSignature parse_entry(const ojson& v, const std::string& where_base)
{
    if (!v.is_object())
        field_error(where_base, "must be an object");
    std::string where = where_base;
    if (auto it = v.find("id"); it != v.end() && it->is_string())
        where += " (" + it->get<std::string>() + ")";
    reject_unknown_keys(v, {"id", "idle_timeout_s", "hard_timeout_s", "t_p_ms",
                            "t_p_adjusted_ms", "lldp", "arp_rebroadcast"},
                        where);
    ControllerSignature sig;
    const auto& id = require(v, "id", where);
    if (!id.is_string() || id.get<std::string>().empty())
        field_error(where, "field 'id' must be a non-empty string");
    sig.id = id.get<std::string>();
    sig.timeouts.idle = parse_timeout(v, "idle_timeout_s", where);
    sig.timeouts.hard = parse_timeout(v, "hard_timeout_s", where);
    double t_p = require_number(v, "t_p_ms", where);
    double t_adj = require_number(v, "t_p_adjusted_ms", where);
    if (t_p < 0 || t_adj < 0)
        field_error(where, "processing times must be >= 0");
    if (t_adj > t_p)
        field_error(where, "t_p_adjusted_ms must not exceed t_p_ms");
    sig.processing = {Millis{t_p}, Millis{t_adj}};
    sig.lldp = parse_lldp(require(v, "lldp", where), where + ".lldp");
    sig.arp_rebroadcast = require_bool(v, "arp_rebroadcast", where);
    return sig;
}

} // namespace

SignatureDatabase parse_database(std::string_view text)
{
    ojson doc = parse_document(text, "signature database");
    if (!doc.is_object())
        field_error("signature database", "top level must be an object");
    reject_unknown_keys(doc, {"version", "signatures", "notes"}, "signature database");
    const auto& version = require(doc, "version", "signature database");
    if (!version.is_number_integer() || version.get<int>() != 1)
        field_error("signature database", "unsupported version (expected 1)");
    const auto& list = require(doc, "signatures", "signature database");
    if (!list.is_array())
        field_error("signature database", "'signatures' must be an array");

    SignatureDatabase db;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto sig = parse_entry(list[i], "signatures[" + std::to_string(i) + "]");
        if (!seen.insert(sig.id).second)
            throw Error(ErrorCode::DuplicateId, "signatures[" + std::to_string(i) +
                                                    "]: duplicate id '" + sig.id + "'");
        db.push_back(std::move(sig));
    }
    return db;
}

SignatureDatabase load_database(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open signature database '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_database(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::string serialize_database(const SignatureDatabase& db)
{
    ojson doc;
    doc["version"] = 1;
    doc["signatures"] = ojson::array();
    for (const auto& sig : db) {
        ojson e;
        e["id"] = sig.id;
        e["idle_timeout_s"] = timeout_json(sig.timeouts.idle);
        e["hard_timeout_s"] = timeout_json(sig.timeouts.hard);
        e["t_p_ms"] = sig.processing.t_p.count();
        e["t_p_adjusted_ms"] = sig.processing.t_p_adjusted.count();
        e["lldp"] = lldp_json(sig.lldp);
        e["arp_rebroadcast"] = sig.arp_rebroadcast;
        doc["signatures"].push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
}

void save_database(const std::filesystem::path& path, const SignatureDatabase& db)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write signature database '" + path.string() + "'");
    out << serialize_database(db);
    if (!out)
        throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

const SignatureDatabase& default_database()
{
    static const SignatureDatabase db = [] {
        auto fin = [](double s) { return Timeout::finite(Seconds{s}); };
        const auto inf = Timeout::infinite();

        LldpProfile odl_lh{Seconds{5}, false, "openflow", std::nullopt, std::nullopt,
                           std::nullopt};
        LldpProfile odl_h{Seconds{300}, false, "OF|[MAC]", std::nullopt, std::nullopt,
                          std::nullopt};
        LldpProfile floodlight{Seconds{15}, false, std::nullopt, std::nullopt,
                               kEthertypeBddp, std::nullopt};
        LldpProfile pox{Seconds{5}, true, std::nullopt, "dpid:[MAC]", std::nullopt,
                        std::nullopt};
        LldpProfile ryu{Seconds{1}, false, std::nullopt, std::nullopt, std::nullopt,
                        std::nullopt};
        LldpProfile beacon{Seconds{15}, false, std::nullopt, std::nullopt, std::nullopt, 2};

        return SignatureDatabase{
            {"beacon", {fin(5), inf}, {Millis{3.197}, Millis{2.370}}, beacon, false},
            {"floodlight", {fin(5), inf}, {Millis{3.454}, Millis{2.627}}, floodlight, false},
            // Idle/hard timeouts are published for OpenDaylight as a whole;
            // both release lines carry 0/0.
            {"opendaylight-hydrogen", {inf, inf}, {Millis{1.004}, Millis{0.177}}, odl_h, true},
            {"opendaylight-lithium-helium", {inf, inf}, {Millis{1.004}, Millis{0.177}}, odl_lh,
             false},
            {"pox", {fin(10), fin(30)}, {Millis{34.266}, Millis{33.439}}, pox, false},
            {"ryu", {inf, inf}, {Millis{5.216}, Millis{4.389}}, ryu, false},
        };
    }();
    return db;
}

const ControllerSignature* find_signature(const SignatureDatabase& db, std::string_view id)
{
    for (const auto& sig : db)
        if (sig.id == id)
            return &sig;
    return nullptr;
}

namespace {

bool timeout_agrees(const Timeout& observed, const Timeout& expected, Seconds tolerance)
{
    if (observed.is_infinite() || expected.is_infinite())
        return observed.is_infinite() && expected.is_infinite();
    return std::abs(observed.seconds().count() - expected.seconds().count()) <=
           tolerance.count() + 1e-12;
}

} // namespace

std::set<ControllerId> match_timeouts(const TimeoutDefaults& observed,
                                      const SignatureDatabase& db, Seconds tolerance)
{
    std::set<ControllerId> out;
    for (const auto& sig : db)
        if (timeout_agrees(observed.idle, sig.timeouts.idle, tolerance) &&
            timeout_agrees(observed.hard, sig.timeouts.hard, tolerance))
            out.insert(sig.id);
    return out;
}

std::vector<ProcessingMatch> match_processing_time(Millis measured_adjusted,
                                                   const SignatureDatabase& db,
                                                   Millis tolerance, Millis ambiguity_margin)
{
    struct Hit {
        const ControllerSignature* sig;
        double distance;
    };
    std::vector<Hit> hits;
    for (const auto& sig : db) {
        double d = std::abs(sig.processing.t_p_adjusted.count() - measured_adjusted.count());
        if (d <= tolerance.count() + 1e-12)
            hits.push_back({&sig, d});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.distance != b.distance)
            return a.distance < b.distance;
        return a.sig->id < b.sig->id;
    });

    std::vector<ProcessingMatch> out;
    for (const auto& h : hits) {
        bool ambiguous = false;
        for (const auto& other : hits) {
            if (other.sig == h.sig)
                continue;
            double gap = std::abs(other.sig->processing.t_p_adjusted.count() -
                                  h.sig->processing.t_p_adjusted.count());
            if (gap <= ambiguity_margin.count() + 1e-12)
                ambiguous = true;
        }
        out.push_back({h.sig->id, Millis{h.distance}, ambiguous});
    }
    return out;
}

namespace {

bool is_hex(char c)
{
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Length of a MAC at the start of `text` written with separator `sep`
// ('\0' for none), or 0 if there is none.
std::size_t mac_length(std::string_view text, char sep)
{
    std::size_t pos = 0;
    for (int i = 0; i < 6; ++i) {
        if (i > 0 && sep != '\0') {
            if (pos >= text.size() || text[pos] != sep)
                return 0;
            ++pos;
        }
        if (pos + 2 > text.size() || !is_hex(text[pos]) || !is_hex(text[pos + 1]))
            return 0;
        pos += 2;
    }
    return pos;
}

} // namespace

bool pattern_matches(std::string_view pattern, std::string_view text)
{
    constexpr std::string_view placeholder = "[MAC]";
    auto at = pattern.find(placeholder);
    if (at == std::string_view::npos)
        return pattern == text;
    if (text.substr(0, at) != pattern.substr(0, at))
        return false;
    auto rest_pattern = pattern.substr(at + placeholder.size());
    auto rest_text = text.substr(at);
    for (char sep : {':', '-', '\0'}) {
        std::size_t n = mac_length(rest_text, sep);
        if (n != 0 && pattern_matches(rest_pattern, rest_text.substr(n)))
            return true;
    }
    return false;
}

} // namespace ofp
