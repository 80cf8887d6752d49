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

#include "ofprint/scan.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ofp {

using namespace detail;

void ScanOptions::validate() const
{
    if (techniques.empty())
        throw Error(ErrorCode::InvalidArgument, "no technique enabled");
    schedule.validate();
    if (lldp_window.count() < 0 || arp_window.count() < 0)
        throw Error(ErrorCode::InvalidArgument, "capture windows must be >= 0");
    if (timeout_tolerance.count() < 0 || processing_tolerance.count() < 0)
        throw Error(ErrorCode::InvalidArgument, "tolerances must be >= 0");
    if (!(fusion.miss_penalty > 0 && fusion.miss_penalty <= 1) || !(fusion.decision_ratio >= 1))
        throw Error(ErrorCode::InvalidArgument, "fusion parameters out of range");
}

namespace {

// Failures that make one technique uninformative without ending the scan.
bool technique_local(ErrorCode c)
{
    switch (c) {
    case ErrorCode::InsufficientSamples:
    case ErrorCode::InsufficientObservations:
    case ErrorCode::InconsistentEnvironment:
    case ErrorCode::ProbeLost:
    case ErrorCode::PeriodTooSmall:
        return true;
    default:
        return false;
    }
}

TechniqueEvidence failed(Technique t, const Error& e)
{
    return make_evidence(t, {}, {std::string(to_string(e.code())) + ": " + e.what()});
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

TechniqueEvidence lldp_evidence(const LldpAnalysis& a)
{
    std::set<ControllerId> ids;
    bool all_advisory = !a.candidates.empty();
    std::vector<std::string> notes = a.notes;
    for (const auto& c : a.candidates) {
        ids.insert(c.id);
        all_advisory = all_advisory && c.advisory;
        std::string line = c.id + ":";
        for (const auto& r : c.rationale)
            line += " " + r + ";";
        line.pop_back();
        notes.push_back(line);
    }
    auto e = make_evidence(Technique::Lldp, ids, std::move(notes));
    if (all_advisory) {
        e.confidence = kAdvisoryLldpConfidence;
        e.notes.push_back("advisory profile only: weight " + fixed(kAdvisoryLldpConfidence, 1));
    }
    return e;
}

Ipv4Address default_unknown_ip(Ipv4Address target)
{
    std::uint32_t base = target.value & 0xffffff00u;
    std::uint32_t pick = base | 254u;
    return Ipv4Address{pick == target.value ? (base | 253u) : pick};
}

ojson rtt_json(const RttStats& b)
{
    ojson j;
    j["rtt_avg_ms"] = b.rtt_avg.count();
    j["rtt_std_ms"] = b.rtt_std.count();
    j["received"] = b.received();
    j["requested"] = b.n;
    return j;
}

ojson lldp_analysis_json(const LldpAnalysis& a)
{
    ojson j;
    j["observations"] = a.observations.size();
    if (a.interval) {
        j["interval"] = {{"mean_s", a.interval->mean.count()},
                         {"std_s", a.interval->std.count()},
                         {"gaps", a.interval->count},
                         {"low_confidence", a.interval->low_confidence}};
    } else {
        j["interval"] = nullptr;
    }
    if (a.sample) {
        const auto& s = *a.sample;
        j["sample"] = {
            {"system_name", s.system_name ? ojson(*s.system_name) : ojson()},
            {"system_description", s.system_description ? ojson(*s.system_description) : ojson()},
            {"unknown_tlv_count", s.unknown_tlv_count},
            {"followed_by_0x8942", s.followed_by_0x8942},
        };
    } else {
        j["sample"] = nullptr;
    }
    j["candidates"] = ojson::array();
    for (const auto& c : a.candidates)
        j["candidates"].push_back({{"id", c.id}, {"advisory", c.advisory}, {"rationale", c.rationale}});
    j["low_confidence"] = a.low_confidence;
    j["notes"] = a.notes;
    return j;
}

ojson verdict_json(const FingerprintVerdict& v)
{
    ojson j;
    j["decided"] = v.decided;
    j["top"] = v.decided ? ojson(v.ranking.front().id) : ojson();
    j["ranking"] = ojson::array();
    for (const auto& r : v.ranking)
        j["ranking"].push_back({{"id", r.id}, {"score", r.score}});
    j["evidence"] = ojson::array();
    for (const auto& e : v.evidence) {
        ojson ej;
        ej["technique"] = to_string(e.technique);
        ej["confidence"] = e.confidence;
        ej["candidates"] = ojson::array();
        for (const auto& [id, score] : e.candidates)
            ej["candidates"].push_back({{"id", id}, {"score", score ? ojson(*score) : ojson()}});
        ej["notes"] = e.notes;
        j["evidence"].push_back(std::move(ej));
    }
    return j;
}

double round_us(double ms)
{
    return std::round(ms * 1000.0) / 1000.0;
}

} // namespace

ScanResult run_scan(ProbeTransport& transport, const ProbeTarget& target,
                    const SignatureDatabase& db, const ScanOptions& options,
                    const std::set<MacAddress>* switch_macs)
{
    options.validate();
    ScanResult r;
    std::vector<TechniqueEvidence> evidence;
    auto enabled = [&](Technique t) { return options.techniques.count(t) > 0; };

    if (enabled(Technique::Lldp)) {
        const std::uint16_t types[] = {kEthertypeLldp, kEthertypeBddp};
        auto frames = transport.capture_frames(types, options.lldp_window);
        r.lldp = analyze_lldp_capture(frames, db);
        evidence.push_back(lldp_evidence(*r.lldp));
    }

    const bool want_timeout = enabled(Technique::Timeout);
    const bool want_processing = enabled(Technique::ProcessingTime);
    if (want_timeout || want_processing) {
        TimingContext ctx(transport, target, options.schedule);
        ctx.rule = options.rule;
        ctx.log = options.log;
        try {
            r.baseline = measure_baseline(ctx);
            TimeoutEstimate est = infer_idle_timeout(ctx, *r.baseline);
            r.timeouts = est;
            if (want_timeout) {
                try {
                    est.hard = infer_hard_timeout(ctx, *r.baseline, est);
                    r.timeouts = est;
                    evidence.push_back(make_evidence(
                        Technique::Timeout, match_timeouts(est, db, options.timeout_tolerance),
                        {"idle " + to_string(est.idle) + ", hard " + to_string(*est.hard)}));
                } catch (const Error& e) {
                    if (!technique_local(e.code()))
                        throw;
                    evidence.push_back(failed(Technique::Timeout, e));
                }
            }
            if (want_processing) {
                try {
                    r.processing = fingerprint_by_processing_time(ctx, *r.baseline, est.idle, db,
                                                                  options.processing_tolerance);
                    std::set<ControllerId> ids;
                    std::vector<std::string> notes{"adjusted processing time " +
                                                   fixed(r.processing->adjusted.count(), 3) + " ms"};
                    for (const auto& m : r.processing->matches) {
                        ids.insert(m.id);
                        notes.push_back(m.id + ": distance " + fixed(m.distance.count(), 3) + " ms" +
                                        (m.ambiguous ? " (ambiguous)" : ""));
                    }
                    evidence.push_back(make_evidence(Technique::ProcessingTime, ids, notes));
                } catch (const Error& e) {
                    if (!technique_local(e.code()))
                        throw;
                    evidence.push_back(failed(Technique::ProcessingTime, e));
                }
            }
        } catch (const Error& e) {
            if (!technique_local(e.code()))
                throw;
            // Baseline or idle search failed: both timing techniques are blind.
            if (want_timeout && std::none_of(evidence.begin(), evidence.end(), [](auto& ev) {
                    return ev.technique == Technique::Timeout;
                }))
                evidence.push_back(failed(Technique::Timeout, e));
            if (want_processing)
                evidence.push_back(failed(Technique::ProcessingTime, e));
        }
    }

    if (enabled(Technique::Arp)) {
        Ipv4Address unknown = options.arp_unknown_ip ? *options.arp_unknown_ip
                                                     : default_unknown_ip(target.destination);
        ArpPacket sent{1, transport.local_mac(), transport.local_address(), MacAddress{}, unknown};
        auto frames = transport.send_arp_probe(unknown, options.arp_window);
        r.arp_rebroadcast = detect_arp_rebroadcast(frames, sent, transport.local_mac(), switch_macs);
        evidence.push_back(make_arp_evidence(*r.arp_rebroadcast, db));
    }

    r.verdict = combine(evidence, db, options.fusion);
    return r;
}

std::string scan_report_json(const ScanResult& r, const ReportContext& context)
{
    ojson doc;
    doc["version"] = 1;
    doc["kind"] = "scan-report";
    doc["source"] = context.source;
    doc["seed"] = context.seed ? ojson(*context.seed) : ojson();
    ojson v = verdict_json(r.verdict);
    for (auto it = v.begin(); it != v.end(); ++it)
        doc[it.key()] = it.value();

    ojson m;
    m["baseline"] = r.baseline ? rtt_json(*r.baseline) : ojson();
    if (r.timeouts) {
        m["timeouts"] = {{"idle_timeout_s", timeout_json(r.timeouts->idle)},
                         {"hard_timeout_s",
                          r.timeouts->hard ? timeout_json(*r.timeouts->hard) : ojson()},
                         {"iterations", r.timeouts->iterations},
                         {"resolution_s", r.timeouts->resolution.count()}};
    } else {
        m["timeouts"] = nullptr;
    }
    if (r.processing) {
        ojson p;
        p["rtt_prime_ms"] = r.processing->rtt_prime.count();
        p["adjusted_ms"] = r.processing->adjusted.count();
        p["matches"] = ojson::array();
        for (const auto& x : r.processing->matches)
            p["matches"].push_back({{"id", x.id},
                                    {"distance_ms", x.distance.count()},
                                    {"ambiguous", x.ambiguous}});
        m["processing"] = std::move(p);
    } else {
        m["processing"] = nullptr;
    }
    m["lldp"] = r.lldp ? lldp_analysis_json(*r.lldp) : ojson();
    m["arp_rebroadcast"] = r.arp_rebroadcast ? ojson(*r.arp_rebroadcast) : ojson();
    doc["measurements"] = std::move(m);
    doc["weights_note"] = "technique confidences, the miss penalty and the decision ratio are "
                          "engineering defaults, not fitted values";
    return doc.dump(2) + "\n";
}

std::vector<BuildOutcome> build_database(SignatureDatabase& db,
                                         const std::vector<ScenarioConfig>& targets,
                                         const ProbeSchedule& schedule, std::uint64_t seed,
                                         const DecisionRule& rule)
{
    schedule.validate();
    std::vector<BuildOutcome> outcomes;
    for (const auto& cfg : targets) {
        BuildOutcome o;
        o.target = cfg.name;
        o.id = cfg.controller.id;
        try {
            auto net = run_scenario(cfg, seed);
            TimingContext ctx(net->attacker(), ProbeTarget{cfg.destination(), std::nullopt},
                              schedule);
            ctx.rule = rule;
            RttStats base = measure_baseline(ctx);
            TimeoutEstimate idle = infer_idle_timeout(ctx, base);
            ProcessingTimeRecord rec = build_processing_time_record(ctx, base, idle.idle);
            rec.t_p = Millis{round_us(rec.t_p.count())};
            rec.t_p_adjusted = Millis{std::min(round_us(rec.t_p_adjusted.count()), rec.t_p.count())};
            o.record = rec;
        } catch (const Error& e) {
            o.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        outcomes.push_back(std::move(o));
    }

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        if (!o.record)
            continue;
        auto it = std::find_if(db.begin(), db.end(), [&](auto& s) { return s.id == *o.id; });
        if (it != db.end()) {
            it->processing = *o.record;
        } else {
            const auto& m = targets[i].controller;
            db.push_back({m.id, {m.idle, m.hard}, *o.record, m.lldp, m.arp_rebroadcast});
        }
    }
    return outcomes;
}

std::string build_report_json(const std::vector<BuildOutcome>& outcomes)
{
    ojson doc;
    doc["version"] = 1;
    doc["kind"] = "build-report";
    doc["targets"] = ojson::array();
    for (const auto& o : outcomes) {
        ojson t;
        t["target"] = o.target;
        t["id"] = o.id ? ojson(*o.id) : ojson();
        if (o.record) {
            t["t_p_ms"] = o.record->t_p.count();
            t["t_p_adjusted_ms"] = o.record->t_p_adjusted.count();
        } else {
            t["t_p_ms"] = nullptr;
            t["t_p_adjusted_ms"] = nullptr;
        }
        t["error"] = o.error ? ojson(*o.error) : ojson();
        doc["targets"].push_back(std::move(t));
    }
    return doc.dump(2) + "\n";
}

ClassifyResult classify_capture(std::span<const CapturedFrame> frames, const SignatureDatabase& db,
                                std::optional<bool> companion_observable, double interval_tolerance)
{
    ClassifyResult r;
    ClassifyOptions opts;
    opts.interval_tolerance = interval_tolerance;
    // Without a single 0x8942 frame the dump may simply have been filtered,
    // so the companion cannot count against or for anyone.
    opts.companion_observable =
        companion_observable.value_or(std::any_of(frames.begin(), frames.end(), [](auto& f) {
            return f.ethertype == kEthertypeBddp;
        }));
    r.analysis = analyze_lldp_capture(frames, db, opts);
    r.decided = r.analysis.candidates.size() == 1;
    return r;
}

std::string classify_report_json(const ClassifyResult& r)
{
    ojson doc;
    doc["version"] = 1;
    doc["kind"] = "classify-report";
    doc["decided"] = r.decided;
    doc["lldp"] = lldp_analysis_json(r.analysis);
    return doc.dump(2) + "\n";
}

} // namespace ofp
