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

// Shared fixtures for the test binaries.

#pragma once

#include "ofprint/frames.hpp"
#include "ofprint/packet_analysis.hpp"
#include "ofprint/signatures.hpp"
#include "ofprint/simnet.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace ofp::test {

inline const SignatureDatabase& db()
{
    return default_database();
}

inline ControllerModel model_of(std::string_view id)
{
    const auto* sig = find_signature(db(), id);
    if (!sig)
        throw std::logic_error("no shipped signature " + std::string(id));
    return ControllerModel::from_signature(*sig);
}

// Noise-free path: 1 ms each way, no jitter, no loss.
inline LinkModel quiet_link(double one_way_ms = 1.0)
{
    LinkModel l;
    l.one_way_latency = Millis{one_way_ms};
    l.jitter = Millis{0};
    l.loss_rate = 0;
    return l;
}

inline ScenarioConfig scenario_with(const ControllerModel& model, const LinkModel& link)
{
    auto cfg = make_scenario(model, NoiseProfile::Default);
    cfg.link = link;
    return cfg;
}

inline ControllerModel custom_model(std::string id, Timeout idle, Timeout hard, double delay_ms,
                                    double jitter_ms = 0)
{
    ControllerModel m;
    m.id = std::move(id);
    m.idle = idle;
    m.hard = hard;
    m.processing_delay = Millis{delay_ms};
    m.processing_jitter = Millis{jitter_ms};
    m.lldp.interval = Seconds{5};
    return m;
}

inline Timeout secs(double s)
{
    return Timeout::finite(Seconds{s});
}

inline LldpTlv text_tlv(std::uint8_t type, std::string_view s)
{
    return {type, bytes_of(s)};
}

// An LLDP frame assembled TLV by TLV, independent of serialize_lldp.
inline CapturedFrame lldp_frame(std::vector<LldpTlv> extra, Seconds at,
                                MacAddress src = MacAddress::parse("00:11:22:33:44:55"))
{
    std::vector<LldpTlv> tlvs = {
        {lldp_tlv::ChassisId, {4, 0x00, 0x11, 0x22, 0x33, 0x44, 0x55}},
        {lldp_tlv::PortId, {2, 0x00, 0x01}},
        {lldp_tlv::Ttl, {0x00, 0x78}},
    };
    tlvs.insert(tlvs.end(), extra.begin(), extra.end());
    auto payload = encode_lldp_tlvs(tlvs);
    auto raw = build_ethernet({kLldpMulticast, src, kEthertypeLldp}, payload);
    return CapturedFrame::from_bytes(std::move(raw), to_timestamp(at));
}

inline LldpObservation observation_at(double seconds)
{
    LldpObservation o;
    o.received_at = to_timestamp(Seconds{seconds});
    o.chassis_id = {4, 1, 2, 3, 4, 5, 6};
    o.port_id = {2, 0, 1};
    o.ttl = 120;
    return o;
}

// Scratch directory removed with the fixture.
class TempDir {
public:
    TempDir()
    {
        std::string tmpl = (std::filesystem::temp_directory_path() / "ofprint-XXXXXX").string();
        if (!mkdtemp(tmpl.data()))
            throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, std::string_view text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace ofp::test
