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

// Scan sessions, database building and offline classification: the work
// behind each CLI subcommand, independent of argument parsing.

#pragma once

#include "ofprint/fusion.hpp"
#include "ofprint/packet_analysis.hpp"
#include "ofprint/simnet.hpp"
#include "ofprint/timing.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace ofp {

// Techniques in the order a scan runs them: passive first.
inline constexpr Technique kTechniqueOrder[] = {Technique::Lldp, Technique::Timeout,
                                                Technique::ProcessingTime, Technique::Arp};

struct ScanOptions {
    std::set<Technique> techniques{std::begin(kTechniqueOrder), std::end(kTechniqueOrder)};
    ProbeSchedule schedule;
    DecisionRule rule;
    Seconds lldp_window{600};
    Seconds arp_window{1};
    Seconds timeout_tolerance = kDefaultTimeoutTolerance;
    Millis processing_tolerance = kDefaultProcessingTolerance;
    FusionParams fusion;
    // Address for the ARP probe; defaults to .254 (or .253) of the target's /24.
    std::optional<Ipv4Address> arp_unknown_ip;
    MeasurementLog* log = nullptr;

    // Throws Error{InvalidArgument}.
    void validate() const;
};

struct ScanResult {
    FingerprintVerdict verdict;
    std::optional<RttStats> baseline;
    std::optional<TimeoutEstimate> timeouts;
    std::optional<ProcessingFingerprint> processing;
    std::optional<LldpAnalysis> lldp;
    std::optional<bool> arp_rebroadcast;
};

/// Runs the enabled techniques one by one against `target` and fuses the
/// evidence. A technique that cannot conclude (too few samples, lost
/// probes, inconsistent measurements) contributes empty evidence with a
/// note; transport failures propagate.
ScanResult run_scan(ProbeTransport& transport, const ProbeTarget& target,
                    const SignatureDatabase& db, const ScanOptions& options,
                    const std::set<MacAddress>* switch_macs = nullptr);

struct ReportContext {
    std::string source; // scenario name or interface
    std::optional<std::uint64_t> seed;
};

// Structured report: version, kind, decided, ranking, evidence trail and
// the raw measurements.
std::string scan_report_json(const ScanResult& result, const ReportContext& context);

struct BuildOutcome {
    std::string target;
    std::optional<ControllerId> id;
    std::optional<ProcessingTimeRecord> record;
    std::optional<std::string> error;
};

/// Measures a processing-time record on every scenario and merges it into
/// `db` (an existing entry keeps everything but its processing times; a
/// new id is added with the model's other parameters). Per-target failures
/// are collected, not thrown.
std::vector<BuildOutcome> build_database(SignatureDatabase& db,
                                         const std::vector<ScenarioConfig>& targets,
                                         const ProbeSchedule& schedule, std::uint64_t seed,
                                         const DecisionRule& rule = {});

std::string build_report_json(const std::vector<BuildOutcome>& outcomes);

struct ClassifyResult {
    LldpAnalysis analysis;
    bool decided = false; // exactly one candidate
};

// `companion_observable` defaults to whether the dump holds any 0x8942 frame.
ClassifyResult classify_capture(std::span<const CapturedFrame> frames, const SignatureDatabase& db,
                                std::optional<bool> companion_observable = std::nullopt,
                                double interval_tolerance = ClassifyOptions{}.interval_tolerance);

std::string classify_report_json(const ClassifyResult& result);

} // namespace ofp
