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

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ofp {

using ControllerId = std::string;

inline constexpr std::uint16_t kEthertypeLldp = 0x88cc;
inline constexpr std::uint16_t kEthertypeBddp = 0x8942;
inline constexpr std::uint16_t kEthertypeArp = 0x0806;
inline constexpr std::uint16_t kEthertypeIpv4 = 0x0800;

struct TimeoutDefaults {
    Timeout idle = Timeout::infinite();
    Timeout hard = Timeout::infinite();

    bool operator==(const TimeoutDefaults&) const = default;
};

struct ProcessingTimeRecord {
    Millis t_p{0};          // mean table-miss RTT
    Millis t_p_adjusted{0}; // t_p minus the RTT with the rule installed

    bool operator==(const ProcessingTimeRecord&) const = default;
};

/**
 * How a controller's discovery traffic looks on the wire. Patterns are
 * literal text with an optional "[MAC]" placeholder standing for a 6-octet
 * MAC address (colon, dash or no separator, any hex case).
 */
struct LldpProfile {
    Seconds interval{1};
    bool interval_variable = false;
    std::optional<std::string> system_name_pattern;
    std::optional<std::string> system_description_pattern;
    std::optional<std::uint16_t> companion_ethertype;
    std::optional<int> unknown_tlv_count;

    // A profile with no content constraints is matched on interval alone,
    // which is weak evidence.
    bool advisory() const
    {
        return !system_name_pattern && !system_description_pattern &&
               !companion_ethertype && !unknown_tlv_count;
    }

    bool operator==(const LldpProfile&) const = default;
};

struct ControllerSignature {
    ControllerId id;
    TimeoutDefaults timeouts;
    ProcessingTimeRecord processing;
    LldpProfile lldp;
    bool arp_rebroadcast = false;

    bool operator==(const ControllerSignature&) const = default;
};

using SignatureDatabase = std::vector<ControllerSignature>;

// Throws Error{Parse} with line or field context, Error{DuplicateId}.
SignatureDatabase parse_database(std::string_view text);
SignatureDatabase load_database(const std::filesystem::path& path);

std::string serialize_database(const SignatureDatabase& db);
void save_database(const std::filesystem::path& path, const SignatureDatabase& db);

// The database shipped with the toolkit (also in data/signatures.json).
const SignatureDatabase& default_database();

const ControllerSignature* find_signature(const SignatureDatabase& db,
                                          std::string_view id);

// Ids whose default timeouts agree with the observation, per field within
// `tolerance`. Infinite only ever matches infinite.
std::set<ControllerId> match_timeouts(const TimeoutDefaults& observed,
                                      const SignatureDatabase& db,
                                      Seconds tolerance);

struct ProcessingMatch {
    ControllerId id;
    Millis distance{0};
    bool ambiguous = false;
};

inline constexpr Millis kDefaultAmbiguityMargin{0.5};

/// Candidates with |t_p_adjusted - measured| <= tolerance, ordered by
/// distance then id. A candidate whose database entry lies within
/// `ambiguity_margin` of another candidate's entry is flagged ambiguous.
std::vector<ProcessingMatch> match_processing_time(
    Millis measured_adjusted, const SignatureDatabase& db, Millis tolerance,
    Millis ambiguity_margin = kDefaultAmbiguityMargin);

bool pattern_matches(std::string_view pattern, std::string_view text);

} // namespace ofp
