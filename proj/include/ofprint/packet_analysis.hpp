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

#include "ofprint/frames.hpp"
#include "ofprint/signatures.hpp"
#include "ofprint/transport.hpp"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ofp {

struct LldpObservation {
    Timestamp received_at{0};
    MacAddress source;                    // Ethernet source, used for pairing
    std::vector<std::uint8_t> chassis_id; // TLV value including subtype byte
    std::vector<std::uint8_t> port_id;    // TLV value including subtype byte
    std::uint16_t ttl = 0;
    std::optional<std::string> system_name;
    std::optional<std::string> system_description;
    int unknown_tlv_count = 0;
    bool followed_by_0x8942 = false;
};

// Throws Error{MalformedFrame} for a truncated TLV, a missing mandatory TLV
// (chassis, port, TTL) or a missing End TLV; Error{InvalidArgument} when
// the frame is not LLDP.
LldpObservation parse_lldp(const CapturedFrame& frame);

/// Builds an LLDP frame carrying the observation's semantic fields. Unknown
/// TLVs are emitted as organizationally-specific TLVs with a fixed body.
CapturedFrame serialize_lldp(const LldpObservation& obs);

inline constexpr Seconds kCompanionPairingWindow{0.100};

/// Sets followed_by_0x8942 on every LLDP observation that is followed,
/// within `window`, by a broadcast 0x8942 frame from the same source.
/// Both inputs must be in timestamp order.
void correlate_companions(std::vector<LldpObservation>& observations,
                          std::span<const CapturedFrame> frames,
                          Seconds window = kCompanionPairingWindow);

using LldpGroupKey = std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>;

inline LldpGroupKey group_key(const LldpObservation& obs)
{ return {obs.chassis_id, obs.port_id}; }

struct IntervalEstimate {
    Seconds mean{0};
    Seconds std{0};
    int count = 0; // number of gaps
    // Set when derived from fewer gaps than estimate_interval requires.
    bool low_confidence = false;
};

// Gaps between consecutive observations of one (chassis, port) source.
// Throws Error{InsufficientObservations} for fewer than 3 observations.
IntervalEstimate estimate_interval(std::span<const LldpObservation> observations,
                                   const LldpGroupKey& key);

struct ClassifyOptions {
    double interval_tolerance = 0.20; // fraction; doubled for variable profiles
    // False when the capture could not have seen 0x8942 frames; the
    // companion constraint is then reported but not enforced.
    bool companion_observable = true;
};

struct LldpMatch {
    ControllerId id;
    std::vector<std::string> rationale;
    bool advisory = false;
};

/// Controllers whose LLDP profile is consistent with the interval (when
/// known) and every content constraint of the sample. Sorted by id.
std::vector<LldpMatch> classify_lldp(const std::optional<IntervalEstimate>& interval,
                                     const LldpObservation& sample,
                                     const SignatureDatabase& db,
                                     const ClassifyOptions& options = {});

struct LldpAnalysis {
    std::vector<LldpObservation> observations;
    std::optional<IntervalEstimate> interval;
    std::optional<LldpObservation> sample;
    std::vector<LldpMatch> candidates;
    bool low_confidence = false;
    std::vector<std::string> notes;
};

/// Full passive pipeline over a capture: parse, pair companions, pick the
/// busiest source group, estimate its interval and classify. With two
/// observations the single gap is used; with one, content alone is matched.
/// Both degrade to a low-confidence result.
LldpAnalysis analyze_lldp_capture(std::span<const CapturedFrame> frames,
                                  const SignatureDatabase& db,
                                  ClassifyOptions options = {});

/// True iff some frame repeats `sent` (an ARP request for the same target
/// IP) with an Ethernet source other than `attacker_mac`, restricted to
/// `switch_macs` when given.
bool detect_arp_rebroadcast(std::span<const CapturedFrame> frames, const ArpPacket& sent,
                            const MacAddress& attacker_mac,
                            const std::set<MacAddress>* switch_macs = nullptr);

/// Offline capture dumps: one frame per line as `<timestamp_us> <hex bytes>`,
/// blank lines and '#' comments ignored. Errors carry the line number.
std::vector<CapturedFrame> parse_capture_dump(std::string_view text);
std::vector<CapturedFrame> load_capture_dump(const std::filesystem::path& path);
void write_capture_dump(std::ostream& os, std::span<const CapturedFrame> frames);

} // namespace ofp
