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

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ofp {

using Millis = std::chrono::duration<double, std::milli>;
using Seconds = std::chrono::duration<double>;

// Monotonic timestamp, nanoseconds since the transport's epoch.
using Timestamp = std::chrono::nanoseconds;

inline Timestamp to_timestamp(Seconds s)
{ return std::chrono::round<Timestamp>(s); }

inline Seconds to_seconds(Timestamp t)
{ return std::chrono::duration_cast<Seconds>(t); }

enum class ErrorCode {
    Parse,
    DuplicateId,
    Io,
    InvalidArgument,
    InvalidConfig,
    TransportDown,
    CaptureUnsupported,
    ProbeLost,
    InsufficientSamples,
    InsufficientObservations,
    InconsistentEnvironment,
    PeriodTooSmall,
    MalformedFrame,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) { }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/**
 * A flow-entry timeout. The OpenFlow value 0 ("never expires") is carried
 * as an explicit infinite marker so that arithmetic only ever sees finite
 * positive durations.
 */
class Timeout {
public:
    static Timeout infinite() { return Timeout{}; }
    static Timeout finite(Seconds s);

    bool is_infinite() const { return !value_; }
    Seconds seconds() const;

    // Deadline relative to a start instant; nullopt when infinite.
    std::optional<Timestamp> deadline_after(Timestamp start) const;

    bool operator==(const Timeout&) const = default;

private:
    std::optional<Seconds> value_;
};

std::string to_string(const Timeout& t);

struct MacAddress {
    std::array<std::uint8_t, 6> bytes{};

    static MacAddress parse(std::string_view text);
    static MacAddress broadcast()
    { return MacAddress{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}}; }

    std::string str() const;
    bool is_broadcast() const { return *this == broadcast(); }

    auto operator<=>(const MacAddress&) const = default;
};

struct Ipv4Address {
    std::uint32_t value = 0;

    static Ipv4Address parse(std::string_view text);
    std::string str() const;
    std::array<std::uint8_t, 4> octets() const;
    static Ipv4Address from_octets(const std::uint8_t* p);

    auto operator<=>(const Ipv4Address&) const = default;
};

} // namespace ofp
