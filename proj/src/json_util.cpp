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

#include "json_util.hpp"

#include <algorithm>
#include <cstdio>

namespace ofp::detail {

[[noreturn]] void field_error(const std::string& where, const std::string& msg)
{
    throw Error(ErrorCode::Parse, where + ": " + msg);
}

void reject_unknown_keys(const ojson& obj, std::initializer_list<const char*> allowed,
                         const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = std::any_of(allowed.begin(), allowed.end(),
                                 [&](const char* k) { return it.key() == k; });
        if (!known)
            field_error(where, "unknown field '" + it.key() + "'");
    }
}

const ojson& require(const ojson& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end())
        field_error(where, std::string("missing field '") + key + "'");
    return *it;
}

double require_number(const ojson& obj, const char* key, const std::string& where)
{
    const auto& v = require(obj, key, where);
    if (!v.is_number())
        field_error(where, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

bool require_bool(const ojson& obj, const char* key, const std::string& where)
{
    const auto& v = require(obj, key, where);
    if (!v.is_boolean())
        field_error(where, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

Timeout parse_timeout(const ojson& obj, const char* key, const std::string& where)
{
    const auto& v = require(obj, key, where);
    if (v.is_string()) {
        if (v.get<std::string>() != "infinite")
            field_error(where, std::string("field '") + key +
                                   "' must be a number or \"infinite\"");
        return Timeout::infinite();
    }
    if (!v.is_number())
        field_error(where, std::string("field '") + key +
                               "' must be a number or \"infinite\"");
    double s = v.get<double>();
    if (s < 0)
        field_error(where, std::string("field '") + key + "' must be >= 0");
    // OpenFlow encodes "never expires" as 0.
    if (s == 0)
        return Timeout::infinite();
    return Timeout::finite(Seconds{s});
}

std::optional<std::string> optional_pattern(const ojson& obj, const char* key,
                                            const std::string& where)
{
    const auto& v = require(obj, key, where);
    if (v.is_null())
        return std::nullopt;
    if (!v.is_string() || v.get<std::string>().empty())
        field_error(where, std::string("field '") + key +
                               "' must be null or a non-empty string");
    return v.get<std::string>();
}

std::optional<std::uint16_t> optional_ethertype(const ojson& obj, const std::string& where)
{
    const auto& v = require(obj, "companion_ethertype", where);
    if (v.is_null())
        return std::nullopt;
    long value = -1;
    if (v.is_number_integer()) {
        value = v.get<long>();
    } else if (v.is_string()) {
        const auto s = v.get<std::string>();
        try {
            std::size_t used = 0;
            value = std::stol(s, &used, 0);
            if (used != s.size())
                value = -1;
        } catch (const std::exception&) {
            value = -1;
        }
    }
    if (value < 0 || value > 0xffff)
        field_error(where, "field 'companion_ethertype' must be null or a 16-bit value");
    return static_cast<std::uint16_t>(value);
}

LldpProfile parse_lldp(const ojson& v, const std::string& where)
{
    if (!v.is_object())
        field_error(where, "must be an object");
    reject_unknown_keys(v, {"interval_s", "interval_variable", "system_name_pattern",
                            "system_description_pattern", "companion_ethertype",
                            "unknown_tlv_count"},
                        where);
    LldpProfile p;
    double interval = require_number(v, "interval_s", where);
    if (!(interval > 0))
        field_error(where, "field 'interval_s' must be > 0");
    p.interval = Seconds{interval};
    p.interval_variable = require_bool(v, "interval_variable", where);
    p.system_name_pattern = optional_pattern(v, "system_name_pattern", where);
    p.system_description_pattern = optional_pattern(v, "system_description_pattern", where);
    p.companion_ethertype = optional_ethertype(v, where);
    const auto& unknown = require(v, "unknown_tlv_count", where);
    if (!unknown.is_null()) {
        if (!unknown.is_number_integer() || unknown.get<long>() < 0 ||
            unknown.get<long>() > 255)
            field_error(where, "field 'unknown_tlv_count' must be null or a small integer");
        p.unknown_tlv_count = unknown.get<int>();
    }
    return p;
}

std::string line_context(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

ojson timeout_json(const Timeout& t)
{
    if (t.is_infinite())
        return "infinite";
    return t.seconds().count();
}

std::string hex16(std::uint16_t v)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%04x", v);
    return buf;
}

} // namespace ofp::detail

namespace ofp::detail {

ojson lldp_json(const LldpProfile& p)
{
    ojson lldp;
    lldp["interval_s"] = p.interval.count();
    lldp["interval_variable"] = p.interval_variable;
    lldp["system_name_pattern"] = p.system_name_pattern ? ojson(*p.system_name_pattern) : ojson();
    lldp["system_description_pattern"] =
        p.system_description_pattern ? ojson(*p.system_description_pattern) : ojson();
    lldp["companion_ethertype"] =
        p.companion_ethertype ? ojson(hex16(*p.companion_ethertype)) : ojson();
    lldp["unknown_tlv_count"] = p.unknown_tlv_count ? ojson(*p.unknown_tlv_count) : ojson();
    return lldp;
}

ojson parse_document(std::string_view text, const std::string& what)
{
    try {
        return ojson::parse(text.begin(), text.end());
    } catch (const ojson::parse_error& e) {
        throw Error(ErrorCode::Parse,
                    what + ": " + line_context(text, e.byte ? e.byte - 1 : 0) + ": " + e.what());
    }
}

} // namespace ofp::detail
