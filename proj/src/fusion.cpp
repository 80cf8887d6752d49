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

#include "ofprint/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace ofp {

const char* to_string(Technique t)
{
    switch (t) {
    case Technique::Lldp: return "lldp";
    case Technique::Timeout: return "timeout";
    case Technique::ProcessingTime: return "processing-time";
    case Technique::Arp: return "arp";
    }
    return "?";
}

std::optional<Technique> parse_technique(std::string_view name)
{
    if (name == "lldp") return Technique::Lldp;
    if (name == "timeout") return Technique::Timeout;
    if (name == "processing-time" || name == "processing_time") return Technique::ProcessingTime;
    if (name == "arp") return Technique::Arp;
    return std::nullopt;
}

double default_confidence(Technique t)
{
    switch (t) {
    case Technique::Lldp: return 1.0;
    case Technique::Timeout: return 0.9;
    case Technique::ProcessingTime: return 0.7;
    case Technique::Arp: return 1.0;
    }
    return 1.0;
}

TechniqueEvidence make_evidence(Technique t, const std::set<ControllerId>& ids,
                                std::vector<std::string> notes)
{
    TechniqueEvidence e;
    e.technique = t;
    for (const auto& id : ids)
        e.candidates.emplace(id, std::nullopt);
    e.confidence = default_confidence(t);
    e.notes = std::move(notes);
    return e;
}

TechniqueEvidence make_arp_evidence(bool rebroadcast_seen, const SignatureDatabase& db)
{
    std::set<ControllerId> ids;
    for (const auto& sig : db)
        if (sig.arp_rebroadcast == rebroadcast_seen)
            ids.insert(sig.id);
    return make_evidence(Technique::Arp, ids,
                         {rebroadcast_seen ? "duplicate ARP request seen from a switch MAC"
                                           : "no duplicate ARP request seen"});
}

namespace {

void validate(const TechniqueEvidence& e)
{
    if (!(e.confidence >= 0.0 && e.confidence <= 1.0))
        throw Error(ErrorCode::InvalidArgument, std::string("evidence confidence for ") +
                                                    to_string(e.technique) + " outside [0,1]");
    double sum = 0;
    for (const auto& [id, score] : e.candidates) {
        if (!score)
            continue;
        if (!(*score >= 0.0 && *score <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "candidate score for '" + id +
                                                        "' outside [0,1]");
        sum += *score;
    }
    if (sum > 1.0 + 1e-9)
        throw Error(ErrorCode::InvalidArgument, std::string("candidate scores for ") +
                                                    to_string(e.technique) + " sum above 1");
}

// Per-candidate factor before confidence weighting.
std::map<ControllerId, double> candidate_factors(const TechniqueEvidence& e)
{
    double scored_sum = 0;
    std::size_t unscored = 0;
    for (const auto& [id, score] : e.candidates) {
        if (score)
            scored_sum += *score;
        else
            ++unscored;
    }
    double share = unscored ? std::max(0.0, 1.0 - scored_sum) / static_cast<double>(unscored) : 0;
    std::map<ControllerId, double> out;
    for (const auto& [id, score] : e.candidates)
        out[id] = score ? *score : share;
    return out;
}

bool canonical_less(const TechniqueEvidence& a, const TechniqueEvidence& b)
{
    return std::tie(a.technique, a.candidates, a.confidence, a.notes) <
           std::tie(b.technique, b.candidates, b.confidence, b.notes);
}

} // namespace

FingerprintVerdict combine(std::span<const TechniqueEvidence> evidence,
                           const SignatureDatabase& db, const FusionParams& params)
{
    FingerprintVerdict verdict;
    verdict.evidence.assign(evidence.begin(), evidence.end());
    for (const auto& e : verdict.evidence)
        validate(e);
    std::sort(verdict.evidence.begin(), verdict.evidence.end(), canonical_less);

    std::set<ControllerId> universe;
    bool informative = false;
    for (const auto& e : verdict.evidence) {
        if (e.candidates.empty())
            continue;
        informative = true;
        for (const auto& [id, _] : e.candidates)
            universe.insert(id);
    }
    if (!informative)
        return verdict;
    for (const auto& sig : db)
        universe.insert(sig.id);

    // Log-domain accumulation in canonical evidence order.
    std::map<ControllerId, double> log_score;
    for (const auto& id : universe)
        log_score[id] = 0.0;
    const double log_miss = std::log(params.miss_penalty);
    std::optional<ControllerId> forced;
    for (const auto& e : verdict.evidence) {
        if (e.candidates.empty())
            continue;
        auto factors = candidate_factors(e);
        for (auto& [id, ls] : log_score) {
            auto it = factors.find(id);
            double lf = it == factors.end() ? log_miss
                                            : std::log(std::max(it->second, params.miss_penalty));
            ls += e.confidence * lf;
        }
        if (e.technique == Technique::Arp) {
            bool positive = std::all_of(e.candidates.begin(), e.candidates.end(), [&](auto& kv) {
                auto* sig = find_signature(db, kv.first);
                return sig && sig->arp_rebroadcast;
            });
            if (positive && e.candidates.size() == 1)
                forced = e.candidates.begin()->first;
        }
    }

    double max_log = -INFINITY;
    for (const auto& [id, ls] : log_score)
        max_log = std::max(max_log, ls);
    std::map<ControllerId, double> raw;
    for (const auto& [id, ls] : log_score)
        raw[id] = std::exp(ls - max_log);

    if (forced) {
        double top = 0;
        for (const auto& [id, s] : raw)
            if (id != *forced)
                top = std::max(top, s);
        if (raw[*forced] <= top)
            raw[*forced] = top * params.decision_ratio;
    }

    double total = 0;
    for (const auto& [id, s] : raw)
        total += s;
    for (const auto& [id, s] : raw)
        verdict.ranking.push_back({id, s / total});
    std::sort(verdict.ranking.begin(), verdict.ranking.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  if (a.score != b.score)
                      return a.score > b.score;
                  return a.id < b.id;
              });

    if (verdict.ranking.size() == 1)
        verdict.decided = true;
    else if (verdict.ranking.size() >= 2)
        verdict.decided = verdict.ranking[0].score >=
                          params.decision_ratio * verdict.ranking[1].score;
    return verdict;
}

} // namespace ofp
