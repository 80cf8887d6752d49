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

#include "ofprint/types.hpp"

#include <cstdio>
#include <sstream>

namespace ofp {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::DuplicateId: return "duplicate id";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::InvalidConfig: return "invalid config";
    case ErrorCode::TransportDown: return "transport down";
    case ErrorCode::CaptureUnsupported: return "capture unsupported";
    case ErrorCode::ProbeLost: return "probe lost";
    case ErrorCode::InsufficientSamples: return "insufficient samples";
    case ErrorCode::InsufficientObservations: return "insufficient observations";
    case ErrorCode::InconsistentEnvironment: return "inconsistent environment";
    case ErrorCode::PeriodTooSmall: return "period too small";
    case ErrorCode::MalformedFrame: return "malformed frame";
    }
    return "unknown error";
}

Timeout Timeout::finite(Seconds s)
{
    if (!(s.count() > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "finite timeout must be > 0 (use infinite for 0)");
    Timeout t;
    t.value_ = s;
    return t;
}

Seconds Timeout::seconds() const
{
    if (!value_)
        throw Error(ErrorCode::InvalidArgument, "timeout is infinite");
    return *value_;
}

std::optional<Timestamp> Timeout::deadline_after(Timestamp start) const
{
    if (!value_)
        return std::nullopt;
    return start + to_timestamp(*value_);
}

std::string to_string(const Timeout& t)
{
    if (t.is_infinite())
        return "infinite";
    std::ostringstream os;
    os << t.seconds().count() << "s";
    return os.str();
}

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

MacAddress MacAddress::parse(std::string_view text)
{
    MacAddress mac;
    std::size_t pos = 0;
    for (int i = 0; i < 6; ++i) {
        if (i > 0) {
            if (pos < text.size() && (text[pos] == ':' || text[pos] == '-'))
                ++pos;
        }
        if (pos + 2 > text.size())
            throw Error(ErrorCode::InvalidArgument,
                        "bad MAC address '" + std::string(text) + "'");
        int hi = hex_value(text[pos]);
        int lo = hex_value(text[pos + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorCode::InvalidArgument,
                        "bad MAC address '" + std::string(text) + "'");
        mac.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
        pos += 2;
    }
    if (pos != text.size())
        throw Error(ErrorCode::InvalidArgument,
                    "bad MAC address '" + std::string(text) + "'");
    return mac;
}

std::string MacAddress::str() const
{
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                  bytes[0], bytes[1], bytes[2], bytes[3], bytes[4], bytes[5]);
    return buf;
}

Ipv4Address Ipv4Address::parse(std::string_view text)
{
    std::uint32_t value = 0;
    int parts = 0;
    std::size_t pos = 0;
    while (parts < 4) {
        std::size_t start = pos;
        unsigned octet = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            octet = octet * 10 + static_cast<unsigned>(text[pos] - '0');
            if (octet > 255 || pos - start >= 3)
                throw Error(ErrorCode::InvalidArgument,
                            "bad IPv4 address '" + std::string(text) + "'");
            ++pos;
        }
        if (pos == start)
            throw Error(ErrorCode::InvalidArgument,
                        "bad IPv4 address '" + std::string(text) + "'");
        value = (value << 8) | octet;
        ++parts;
        if (parts < 4) {
            if (pos >= text.size() || text[pos] != '.')
                throw Error(ErrorCode::InvalidArgument,
                            "bad IPv4 address '" + std::string(text) + "'");
            ++pos;
        }
    }
    if (pos != text.size())
        throw Error(ErrorCode::InvalidArgument,
                    "bad IPv4 address '" + std::string(text) + "'");
    return Ipv4Address{value};
}

std::string Ipv4Address::str() const
{
    auto o = octets();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", o[0], o[1], o[2], o[3]);
    return buf;
}

std::array<std::uint8_t, 4> Ipv4Address::octets() const
{
    return {static_cast<std::uint8_t>(value >> 24),
            static_cast<std::uint8_t>(value >> 16),
            static_cast<std::uint8_t>(value >> 8),
            static_cast<std::uint8_t>(value)};
}

Ipv4Address Ipv4Address::from_octets(const std::uint8_t* p)
{
    return Ipv4Address{(std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                       (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3])};
}

} // namespace ofp
