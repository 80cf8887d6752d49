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

#pragma once

#include "ofprint/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ofp {

struct ProbeTarget {
    Ipv4Address destination;
    // Source address to claim instead of our own, forcing a table miss.
    std::optional<Ipv4Address> spoof_source;
};

struct RttSample {
    std::uint32_t sequence = 0;
    std::optional<Millis> rtt; // empty when lost
    Timestamp sent_at{0};

    bool lost() const { return !rtt.has_value(); }
};

struct CapturedFrame {
    std::vector<std::uint8_t> raw;
    Timestamp received_at{0};
    std::uint16_t ethertype = 0;

    // Throws Error{MalformedFrame} when shorter than an Ethernet header.
    static CapturedFrame from_bytes(std::vector<std::uint8_t> raw, Timestamp at);
};

inline constexpr Seconds kDefaultProbeTimeout{1.0};
inline constexpr std::size_t kProbePayloadBytes = 56;

/**
 * The attacker's view of the data plane. A handle belongs to one scan
 * session at a time; probes on one handle must not interleave.
 */
class ProbeTransport {
public:
    virtual ~ProbeTransport() = default;

    // Echo request/reply. Loss is reported in the sample, never thrown;
    // Error{TransportDown} is reserved for a dead transport.
    virtual RttSample send_probe(const ProbeTarget& target) = 0;

    virtual std::vector<CapturedFrame> capture_frames(std::span<const std::uint16_t> ethertypes,
                                                      Seconds window) = 0;

    // Sends a broadcast ARP request for `unknown_ip` and returns the ARP
    // frames observed during `window`, excluding our own transmission.
    virtual std::vector<CapturedFrame> send_arp_probe(Ipv4Address unknown_ip,
                                                      Seconds window) = 0;

    virtual Timestamp now() const = 0;
    virtual void sleep_until(Timestamp t) = 0;
    void sleep_for(Seconds d) { sleep_until(now() + to_timestamp(d)); }

    virtual Ipv4Address local_address() const = 0;
    virtual MacAddress local_mac() const = 0;
};

} // namespace ofp
