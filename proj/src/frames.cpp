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

#include "ofprint/frames.hpp"
#include "ofprint/signatures.hpp"
#include "ofprint/transport.hpp"

#include <algorithm>

namespace ofp {

namespace {

void put16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint16_t get16(const std::uint8_t* p)
{
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

void put_mac(std::vector<std::uint8_t>& out, const MacAddress& mac)
{
    out.insert(out.end(), mac.bytes.begin(), mac.bytes.end());
}

MacAddress get_mac(const std::uint8_t* p)
{
    MacAddress mac;
    std::copy(p, p + 6, mac.bytes.begin());
    return mac;
}

} // namespace

std::vector<std::uint8_t> build_ethernet(const EthernetHeader& hdr,
                                         std::span<const std::uint8_t> payload)
{
    std::vector<std::uint8_t> out;
    out.reserve(kEthernetHeaderLen + payload.size());
    put_mac(out, hdr.dst);
    put_mac(out, hdr.src);
    put16(out, hdr.ethertype);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

EthernetHeader parse_ethernet(std::span<const std::uint8_t> frame)
{
    if (frame.size() < kEthernetHeaderLen)
        throw Error(ErrorCode::MalformedFrame,
                    "frame shorter than an Ethernet header (" +
                        std::to_string(frame.size()) + " bytes)");
    return {get_mac(frame.data()), get_mac(frame.data() + 6), get16(frame.data() + 12)};
}

CapturedFrame CapturedFrame::from_bytes(std::vector<std::uint8_t> raw, Timestamp at)
{
    auto hdr = parse_ethernet(raw);
    return CapturedFrame{std::move(raw), at, hdr.ethertype};
}

std::vector<std::uint8_t> build_arp_frame(const MacAddress& eth_src, const MacAddress& eth_dst,
                                          const ArpPacket& arp)
{
    std::vector<std::uint8_t> payload;
    payload.reserve(28);
    put16(payload, 1);      // Ethernet
    put16(payload, 0x0800); // IPv4
    payload.push_back(6);
    payload.push_back(4);
    put16(payload, arp.op);
    put_mac(payload, arp.sender_mac);
    auto sip = arp.sender_ip.octets();
    payload.insert(payload.end(), sip.begin(), sip.end());
    put_mac(payload, arp.target_mac);
    auto tip = arp.target_ip.octets();
    payload.insert(payload.end(), tip.begin(), tip.end());
    return build_ethernet({eth_dst, eth_src, kEthertypeArp}, payload);
}

std::optional<std::pair<EthernetHeader, ArpPacket>> parse_arp_frame(
    std::span<const std::uint8_t> frame)
{
    if (frame.size() < kEthernetHeaderLen + 28)
        return std::nullopt;
    auto hdr = parse_ethernet(frame);
    if (hdr.ethertype != kEthertypeArp)
        return std::nullopt;
    const std::uint8_t* p = frame.data() + kEthernetHeaderLen;
    if (get16(p) != 1 || get16(p + 2) != 0x0800 || p[4] != 6 || p[5] != 4)
        return std::nullopt;
    ArpPacket arp;
    arp.op = get16(p + 6);
    arp.sender_mac = get_mac(p + 8);
    arp.sender_ip = Ipv4Address::from_octets(p + 14);
    arp.target_mac = get_mac(p + 18);
    arp.target_ip = Ipv4Address::from_octets(p + 24);
    return std::make_pair(hdr, arp);
}

std::vector<std::uint8_t> encode_lldp_tlvs(std::span<const LldpTlv> tlvs)
{
    std::vector<std::uint8_t> out;
    auto put_tlv = [&out](std::uint8_t type, std::span<const std::uint8_t> value) {
        if (type > 127)
            throw Error(ErrorCode::InvalidArgument, "LLDP TLV type exceeds 7 bits");
        if (value.size() > 511)
            throw Error(ErrorCode::InvalidArgument, "LLDP TLV value exceeds 511 bytes");
        std::uint16_t head = static_cast<std::uint16_t>((type << 9) | value.size());
        put16(out, head);
        out.insert(out.end(), value.begin(), value.end());
    };
    for (const auto& tlv : tlvs) {
        if (tlv.type == lldp_tlv::End)
            break;
        put_tlv(tlv.type, tlv.value);
    }
    put_tlv(lldp_tlv::End, {});
    return out;
}

std::vector<LldpTlv> decode_lldp_tlvs(std::span<const std::uint8_t> payload)
{
    std::vector<LldpTlv> out;
    std::size_t pos = 0;
    while (true) {
        if (pos + 2 > payload.size())
            throw Error(ErrorCode::MalformedFrame,
                        pos == payload.size() ? "LLDP payload has no End TLV"
                                              : "truncated LLDP TLV header");
        std::uint16_t head = get16(payload.data() + pos);
        std::uint8_t type = static_cast<std::uint8_t>(head >> 9);
        std::size_t len = head & 0x1ff;
        pos += 2;
        if (pos + len > payload.size())
            throw Error(ErrorCode::MalformedFrame,
                        "truncated LLDP TLV (type " + std::to_string(type) + ", length " +
                            std::to_string(len) + ")");
        if (type == lldp_tlv::End) {
            if (len != 0)
                throw Error(ErrorCode::MalformedFrame, "End TLV with non-zero length");
            return out;
        }
        out.push_back({type, {payload.begin() + static_cast<std::ptrdiff_t>(pos),
                              payload.begin() + static_cast<std::ptrdiff_t>(pos + len)}});
        pos += len;
    }
}

std::vector<std::uint8_t> bytes_of(std::string_view s)
{
    return {s.begin(), s.end()};
}

} // namespace ofp
