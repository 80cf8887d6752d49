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

#include "ofprint/signatures.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace ofp {

enum class Technique { Lldp, Timeout, ProcessingTime, Arp };

const char* to_string(Technique t);
// Accepts "lldp", "timeout", "processing-time" (or "processing_time"), "arp".
std::optional<Technique> parse_technique(std::string_view name);

// Engineering defaults, not fitted values.
double default_confidence(Technique t);
inline constexpr double kAdvisoryLldpConfidence = 0.5;

struct TechniqueEvidence {
    Technique technique = Technique::Timeout;
    // Candidate -> optional score in [0,1]; unscored candidates share the
    // mass left over by the scored ones.
    std::map<ControllerId, std::optional<double>> candidates;
    double confidence = 1.0;
    std::vector<std::string> notes;

    bool operator==(const TechniqueEvidence&) const = default;
};

TechniqueEvidence make_evidence(Technique t, const std::set<ControllerId>& ids,
                                std::vector<std::string> notes = {});

// Positive evidence names the database's rebroadcasting controller(s);
// negative evidence names every other controller.
TechniqueEvidence make_arp_evidence(bool rebroadcast_seen, const SignatureDatabase& db);

struct RankedCandidate {
    ControllerId id;
    double score = 0;

    bool operator==(const RankedCandidate&) const = default;
};

struct FingerprintVerdict {
    std::vector<RankedCandidate> ranking; // descending score, ties by id
    bool decided = false;
    std::vector<TechniqueEvidence> evidence; // canonical order

    bool operator==(const FingerprintVerdict&) const = default;
};

struct FusionParams {
    double miss_penalty = 0.05;
    double decision_ratio = 2.0;
};

/**
 * Merges per-technique candidate sets into one ranking.
 *
 * Each controller's score is the product over informative techniques of
 * factor^confidence, where factor is the candidate's score (or the miss
 * penalty when absent from the set); the products are then normalized.
 * Positive ARP evidence puts the rebroadcasting controller first. The
 * verdict is decided when top/runner-up >= decision_ratio.
 *
 * Throws Error{InvalidArgument} for out-of-range confidences or scores.
 */
FingerprintVerdict combine(std::span<const TechniqueEvidence> evidence,
                           const SignatureDatabase& db, const FusionParams& params = {});

} // namespace ofp
