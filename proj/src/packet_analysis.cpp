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

#include "ofprint/packet_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace ofp {

LldpObservation parse_lldp(const CapturedFrame& frame)
{
    auto hdr = parse_ethernet(frame.raw);
    if (hdr.ethertype != kEthertypeLldp)
        throw Error(ErrorCode::InvalidArgument, "not an LLDP frame");

    auto tlvs = decode_lldp_tlvs(std::span(frame.raw).subspan(kEthernetHeaderLen));

    LldpObservation obs;
    obs.received_at = frame.received_at;
    obs.source = hdr.src;
    bool have_ttl = false;
    for (const auto& tlv : tlvs) {
        switch (tlv.type) {
        case lldp_tlv::ChassisId:
            obs.chassis_id = tlv.value;
            break;
        case lldp_tlv::PortId:
            obs.port_id = tlv.value;
            break;
        case lldp_tlv::Ttl:
            if (tlv.value.size() != 2)
                throw Error(ErrorCode::MalformedFrame, "TTL TLV must be 2 bytes");
            obs.ttl = static_cast<std::uint16_t>((tlv.value[0] << 8) | tlv.value[1]);
            have_ttl = true;
            break;
        case lldp_tlv::SystemName:
            obs.system_name.emplace(tlv.value.begin(), tlv.value.end());
            break;
        case lldp_tlv::SystemDescription:
            obs.system_description.emplace(tlv.value.begin(), tlv.value.end());
            break;
        default:
            ++obs.unknown_tlv_count;
        }
    }
    if (obs.chassis_id.empty())
        throw Error(ErrorCode::MalformedFrame, "LLDP frame lacks a Chassis ID TLV");
    if (obs.port_id.empty())
        throw Error(ErrorCode::MalformedFrame, "LLDP frame lacks a Port ID TLV");
    if (!have_ttl)
        throw Error(ErrorCode::MalformedFrame, "LLDP frame lacks a TTL TLV");
    return obs;
}

CapturedFrame serialize_lldp(const LldpObservation& obs)
{
    std::vector<LldpTlv> tlvs;
    tlvs.push_back({lldp_tlv::ChassisId, obs.chassis_id});
    tlvs.push_back({lldp_tlv::PortId, obs.port_id});
    tlvs.push_back({lldp_tlv::Ttl, {static_cast<std::uint8_t>(obs.ttl >> 8),
                                    static_cast<std::uint8_t>(obs.ttl)}});
    if (obs.system_name)
        tlvs.push_back({lldp_tlv::SystemName, bytes_of(*obs.system_name)});
    if (obs.system_description)
        tlvs.push_back({lldp_tlv::SystemDescription, bytes_of(*obs.system_description)});
    for (int i = 0; i < obs.unknown_tlv_count; ++i) {
        // OUI 00:26:e1 plus a subtype byte and one octet of payload.
        tlvs.push_back({lldp_tlv::OrgSpecific,
                        {0x00, 0x26, 0xe1, static_cast<std::uint8_t>(i),
                         static_cast<std::uint8_t>(0x10 + i)}});
    }
    auto payload = encode_lldp_tlvs(tlvs);
    auto raw = build_ethernet({kLldpMulticast, obs.source, kEthertypeLldp}, payload);
    return CapturedFrame{std::move(raw), obs.received_at, kEthertypeLldp};
}

void correlate_companions(std::vector<LldpObservation>& observations,
                          std::span<const CapturedFrame> frames, Seconds window)
{
    const auto limit = to_timestamp(window);
    for (const auto& f : frames) {
        if (f.ethertype != kEthertypeBddp || f.raw.size() < kEthernetHeaderLen)
            continue;
        auto hdr = parse_ethernet(f.raw);
        if (!hdr.dst.is_broadcast())
            continue;
        // Most recent LLDP frame from the same source at or before this one.
        LldpObservation* best = nullptr;
        for (auto& obs : observations) {
            if (obs.received_at > f.received_at)
                break;
            if (obs.source == hdr.src)
                best = &obs;
        }
        if (best && f.received_at - best->received_at <= limit)
            best->followed_by_0x8942 = true;
    }
}

IntervalEstimate estimate_interval(std::span<const LldpObservation> observations,
                                   const LldpGroupKey& key)
{
    std::vector<double> times;
    for (const auto& obs : observations)
        if (obs.chassis_id == key.first && obs.port_id == key.second)
            times.push_back(to_seconds(obs.received_at).count());
    if (times.size() < 3)
        throw Error(ErrorCode::InsufficientObservations,
                    "interval estimation needs at least 3 observations from one source, got " +
                        std::to_string(times.size()));
    std::sort(times.begin(), times.end());

    std::vector<double> gaps;
    for (std::size_t i = 1; i < times.size(); ++i)
        gaps.push_back(times[i] - times[i - 1]);
    double mean = 0;
    for (double g : gaps)
        mean += g;
    mean /= static_cast<double>(gaps.size());
    double var = 0;
    for (double g : gaps)
        var += (g - mean) * (g - mean);
    var /= static_cast<double>(gaps.size() - 1);
    if (!(mean > 0))
        throw Error(ErrorCode::InsufficientObservations,
                    "observations share one timestamp; no interval");
    return {Seconds{mean}, Seconds{std::sqrt(var)}, static_cast<int>(gaps.size()), false};
}

namespace {

std::string fmt(const char* format, double a, double b = 0, double c = 0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

} // namespace

std::vector<LldpMatch> classify_lldp(const std::optional<IntervalEstimate>& interval,
                                     const LldpObservation& sample, const SignatureDatabase& db,
                                     const ClassifyOptions& options)
{
    std::vector<LldpMatch> out;
    for (const auto& sig : db) {
        const auto& p = sig.lldp;
        LldpMatch m{sig.id, {}, p.advisory()};
        bool ok = true;

        if (interval) {
            double tol = options.interval_tolerance * (p.interval_variable ? 2.0 : 1.0);
            double expected = p.interval.count();
            double diff = std::abs(interval->mean.count() - expected);
            if (diff > tol * expected + 1e-12)
                continue;
            m.rationale.push_back(fmt("interval %.3f s within %.0f%% of %g s",
                                      interval->mean.count(), tol * 100, expected));
        } else {
            m.rationale.push_back("interval unknown; content-only match");
        }

        if (p.system_name_pattern) {
            if (!sample.system_name || !pattern_matches(*p.system_name_pattern, *sample.system_name))
                continue;
            m.rationale.push_back("system name '" + *sample.system_name + "' matches '" +
                                  *p.system_name_pattern + "'");
        }
        if (p.system_description_pattern) {
            if (!sample.system_description ||
                !pattern_matches(*p.system_description_pattern, *sample.system_description))
                continue;
            m.rationale.push_back("system description '" + *sample.system_description +
                                  "' matches '" + *p.system_description_pattern + "'");
        }
        if (p.unknown_tlv_count) {
            if (sample.unknown_tlv_count != *p.unknown_tlv_count)
                continue;
            m.rationale.push_back(std::to_string(sample.unknown_tlv_count) + " unknown TLVs");
        }

        // The companion is two-sided: a profile with one needs it, a profile
        // without one is contradicted by it.
        bool wants_companion = p.companion_ethertype.has_value();
        if (options.companion_observable) {
            if (wants_companion != sample.followed_by_0x8942)
                ok = false;
            else if (wants_companion)
                m.rationale.push_back("each LLDP frame followed by a 0x8942 broadcast");
        } else if (wants_companion) {
            m.rationale.push_back("companion 0x8942 frame expected but not observable in capture");
        }
        if (!ok)
            continue;

        if (m.advisory)
            m.rationale.push_back("advisory profile (interval only)");
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(),
              [](const LldpMatch& a, const LldpMatch& b) { return a.id < b.id; });
    return out;
}

LldpAnalysis analyze_lldp_capture(std::span<const CapturedFrame> frames,
                                  const SignatureDatabase& db, ClassifyOptions options)
{
    LldpAnalysis result;

    std::vector<CapturedFrame> ordered(frames.begin(), frames.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const CapturedFrame& a, const CapturedFrame& b) {
                         return a.received_at < b.received_at;
                     });

    int malformed = 0;
    for (const auto& f : ordered) {
        if (f.ethertype != kEthertypeLldp)
            continue;
        try {
            result.observations.push_back(parse_lldp(f));
        } catch (const Error&) {
            ++malformed;
        }
    }
    if (malformed > 0)
        result.notes.push_back(std::to_string(malformed) + " malformed LLDP frame(s) skipped");
    if (result.observations.empty()) {
        result.notes.push_back("no LLDP frames in capture");
        result.low_confidence = true;
        return result;
    }
    correlate_companions(result.observations, ordered);

    std::map<LldpGroupKey, std::vector<const LldpObservation*>> groups;
    for (const auto& obs : result.observations)
        groups[group_key(obs)].push_back(&obs);
    auto busiest = std::max_element(groups.begin(), groups.end(), [](auto& a, auto& b) {
        return a.second.size() < b.second.size();
    });
    const auto& members = busiest->second;

    LldpObservation sample = *members.back();
    sample.followed_by_0x8942 = std::any_of(members.begin(), members.end(), [](auto* o) {
        return o->followed_by_0x8942;
    });
    result.sample = sample;

    if (members.size() >= 3) {
        result.interval = estimate_interval(result.observations, busiest->first);
    } else if (members.size() == 2) {
        double gap = to_seconds(members[1]->received_at - members[0]->received_at).count();
        if (gap > 0)
            result.interval = IntervalEstimate{Seconds{gap}, Seconds{0}, 1, true};
        result.low_confidence = true;
        result.notes.push_back("insufficient observations: interval from a single gap");
    } else {
        result.low_confidence = true;
        result.notes.push_back("insufficient observations: content-only match");
    }
    result.candidates = classify_lldp(result.interval, sample, db, options);
    return result;
}

bool detect_arp_rebroadcast(std::span<const CapturedFrame> frames, const ArpPacket& sent,
                            const MacAddress& attacker_mac,
                            const std::set<MacAddress>* switch_macs)
{
    for (const auto& f : frames) {
        auto parsed = parse_arp_frame(f.raw);
        if (!parsed)
            continue;
        const auto& [eth, arp] = *parsed;
        if (arp.op != 1 || arp.target_ip != sent.target_ip)
            continue;
        if (eth.src == attacker_mac)
            continue;
        if (switch_macs && !switch_macs->count(eth.src))
            continue;
        return true;
    }
    return false;
}

} // namespace ofp

namespace ofp {

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::vector<CapturedFrame> parse_capture_dump(std::string_view text)
{
    std::vector<CapturedFrame> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#')
            continue;
        line = line.substr(first);

        auto fail = [&](const std::string& msg) -> Error {
            return Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + msg);
        };
        auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos)
            throw fail("expected '<timestamp_us> <hex bytes>'");
        std::string_view ts = line.substr(0, sp);
        std::int64_t us = 0;
        for (char c : ts) {
            if (c < '0' || c > '9')
                throw fail("timestamp must be a non-negative integer of microseconds");
            if (us > (INT64_MAX - 9) / 10 / 1000)
                throw fail("timestamp out of range");
            us = us * 10 + (c - '0');
        }
        std::vector<std::uint8_t> raw;
        int hi = -1;
        for (char c : line.substr(sp)) {
            if (c == ' ' || c == '\t' || c == ':')
                continue;
            int v = hex_value(c);
            if (v < 0)
                throw fail(std::string("invalid hex digit '") + c + "'");
            if (hi < 0) {
                hi = v;
            } else {
                raw.push_back(static_cast<std::uint8_t>(hi << 4 | v));
                hi = -1;
            }
        }
        if (hi >= 0)
            throw fail("odd number of hex digits");
        try {
            out.push_back(CapturedFrame::from_bytes(std::move(raw), std::chrono::microseconds{us}));
        } catch (const Error& e) {
            throw fail(e.what());
        }
    }
    return out;
}

std::vector<CapturedFrame> load_capture_dump(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open capture '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_capture_dump(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_capture_dump(std::ostream& os, std::span<const CapturedFrame> frames)
{
    static constexpr char digits[] = "0123456789abcdef";
    for (const auto& f : frames) {
        os << std::chrono::duration_cast<std::chrono::microseconds>(f.received_at).count() << ' ';
        for (std::uint8_t b : f.raw)
            os << digits[b >> 4] << digits[b & 0xf];
        os << '\n';
    }
}

} // namespace ofp
