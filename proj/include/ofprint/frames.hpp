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

inline constexpr std::size_t kEthernetHeaderLen = 14;

struct EthernetHeader {
    MacAddress dst;
    MacAddress src;
    std::uint16_t ethertype = 0;
};

std::vector<std::uint8_t> build_ethernet(const EthernetHeader& hdr,
                                         std::span<const std::uint8_t> payload);
// Throws Error{MalformedFrame} on short input.
EthernetHeader parse_ethernet(std::span<const std::uint8_t> frame);

struct ArpPacket {
    std::uint16_t op = 1; // 1 request, 2 reply
    MacAddress sender_mac;
    Ipv4Address sender_ip;
    MacAddress target_mac;
    Ipv4Address target_ip;

    bool operator==(const ArpPacket&) const = default;
};

std::vector<std::uint8_t> build_arp_frame(const MacAddress& eth_src, const MacAddress& eth_dst,
                                          const ArpPacket& arp);
// nullopt when the frame is not a well-formed Ethernet/IPv4 ARP packet.
std::optional<std::pair<EthernetHeader, ArpPacket>> parse_arp_frame(
    std::span<const std::uint8_t> frame);

/* LLDP TLV format (IEEE 802.1AB):
 * ---------------------------------------------
 * | 7 bits type | 9 bits length | n bits data |
 * ---------------------------------------------
 */
namespace lldp_tlv {
inline constexpr std::uint8_t End = 0;
inline constexpr std::uint8_t ChassisId = 1;
inline constexpr std::uint8_t PortId = 2;
inline constexpr std::uint8_t Ttl = 3;
inline constexpr std::uint8_t PortDescription = 4;
inline constexpr std::uint8_t SystemName = 5;
inline constexpr std::uint8_t SystemDescription = 6;
inline constexpr std::uint8_t OrgSpecific = 127;
} // namespace lldp_tlv

inline const MacAddress kLldpMulticast{{0x01, 0x80, 0xc2, 0x00, 0x00, 0x0e}};

struct LldpTlv {
    std::uint8_t type = 0;
    std::vector<std::uint8_t> value;

    bool operator==(const LldpTlv&) const = default;
};

// Appends the End TLV. Throws Error{InvalidArgument} for a type > 127 or a
// value longer than 511 bytes.
std::vector<std::uint8_t> encode_lldp_tlvs(std::span<const LldpTlv> tlvs);

// Decodes up to and including the End TLV (which is not returned). Throws
// Error{MalformedFrame} on truncation or a missing End TLV.
std::vector<LldpTlv> decode_lldp_tlvs(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> bytes_of(std::string_view s);

} // namespace ofp
