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

#include "ofprint/ofprint.h"

#include "ofprint/live.hpp"
#include "ofprint/scan.hpp"

#include <fstream>
#include <sstream>

struct ofp_db {
    ofp::SignatureDatabase sigs;
};

struct ofp_report {
    std::string json;
    bool decided = false;
    std::string top;
    std::size_t failures = 0;
};

namespace {

thread_local std::string g_last_error;

ofp_status status_of(ofp::ErrorCode c)
{
    using ofp::ErrorCode;
    switch (c) {
    case ErrorCode::Parse: return OFP_E_PARSE;
    case ErrorCode::DuplicateId: return OFP_E_DUPLICATE_ID;
    case ErrorCode::Io: return OFP_E_IO;
    case ErrorCode::InvalidArgument: return OFP_E_INVALID_ARGUMENT;
    case ErrorCode::InvalidConfig: return OFP_E_INVALID_CONFIG;
    case ErrorCode::TransportDown: return OFP_E_TRANSPORT_DOWN;
    case ErrorCode::CaptureUnsupported: return OFP_E_CAPTURE_UNSUPPORTED;
    case ErrorCode::ProbeLost: return OFP_E_PROBE_LOST;
    case ErrorCode::InsufficientSamples: return OFP_E_INSUFFICIENT_SAMPLES;
    case ErrorCode::InsufficientObservations: return OFP_E_INSUFFICIENT_OBSERVATIONS;
    case ErrorCode::InconsistentEnvironment: return OFP_E_INCONSISTENT_ENVIRONMENT;
    case ErrorCode::PeriodTooSmall: return OFP_E_PERIOD_TOO_SMALL;
    case ErrorCode::MalformedFrame: return OFP_E_MALFORMED_FRAME;
    }
    return OFP_E_INTERNAL;
}

template <typename F>
ofp_status guarded(F&& f)
{
    g_last_error.clear();
    try {
        f();
        return OFP_OK;
    } catch (const ofp::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OFP_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return OFP_E_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    if (!p)
        throw ofp::Error(ofp::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

ofp_options defaults()
{
    ofp_options o;
    ofp_options_init(&o);
    return o;
}

ofp::NoiseProfile profile_of(const ofp_options& o, ofp::NoiseProfile fallback)
{
    if (!o.profile)
        return fallback;
    auto p = ofp::parse_noise_profile(o.profile);
    if (!p)
        throw ofp::Error(ofp::ErrorCode::InvalidArgument,
                         std::string("unknown noise profile '") + o.profile + "'");
    return *p;
}

ofp::ScanOptions scan_options_of(const ofp_options& o)
{
    ofp::ScanOptions s;
    if (o.techniques) {
        s.techniques.clear();
        std::stringstream ss(o.techniques);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty())
                continue;
            auto t = ofp::parse_technique(item);
            if (!t)
                throw ofp::Error(ofp::ErrorCode::InvalidArgument, "unknown technique '" + item + "'");
            s.techniques.insert(*t);
        }
    }
    if (o.n > 0)
        s.schedule.n = o.n;
    if (o.m > 0)
        s.schedule.m = o.m;
    if (o.step_s > 0) {
        s.schedule.step = ofp::Seconds{o.step_s};
        s.schedule.resolution = std::min(s.schedule.resolution, s.schedule.step);
    }
    if (o.period_s > 0)
        s.schedule.period = ofp::Seconds{o.period_s};
    if (o.wait_cap_s > 0)
        s.schedule.wait_cap = ofp::Seconds{o.wait_cap_s};
    if (o.lldp_window_s > 0)
        s.lldp_window = ofp::Seconds{o.lldp_window_s};
    s.validate();
    return s;
}

std::ofstream open_out(const char* path, const char* what)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw ofp::Error(ofp::ErrorCode::Io, std::string("cannot write ") + what + " '" + path + "'");
    return f;
}

ofp_report* scan_report(const ofp::ScanResult& r, const ofp::ReportContext& ctx)
{
    auto* rep = new ofp_report;
    rep->json = ofp::scan_report_json(r, ctx);
    rep->decided = r.verdict.decided;
    if (r.verdict.decided)
        rep->top = r.verdict.ranking.front().id;
    return rep;
}

} // namespace

extern "C" {

const char* ofp_status_string(ofp_status status)
{
    switch (status) {
    case OFP_OK: return "ok";
    case OFP_E_INTERNAL: return "internal error";
    default: break;
    }
    for (int c = 0; c <= static_cast<int>(ofp::ErrorCode::MalformedFrame); ++c)
        if (status_of(static_cast<ofp::ErrorCode>(c)) == status)
            return ofp::to_string(static_cast<ofp::ErrorCode>(c));
    return "unknown status";
}

const char* ofp_last_error(void)
{
    return g_last_error.c_str();
}

const char* ofp_version(void)
{
    return "1.0.0";
}

ofp_status ofp_db_default(ofp_db** out)
{
    return guarded([&] {
        need(out, "out");
        *out = new ofp_db{ofp::default_database()};
    });
}

ofp_status ofp_db_load(const char* path, ofp_db** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new ofp_db{ofp::load_database(path)};
    });
}

ofp_status ofp_db_save(const ofp_db* db, const char* path)
{
    return guarded([&] {
        need(db, "db");
        need(path, "path");
        ofp::save_database(path, db->sigs);
    });
}

size_t ofp_db_size(const ofp_db* db)
{
    return db ? db->sigs.size() : 0;
}

const char* ofp_db_id(const ofp_db* db, size_t index)
{
    if (!db || index >= db->sigs.size())
        return nullptr;
    return db->sigs[index].id.c_str();
}

void ofp_db_free(ofp_db* db)
{
    delete db;
}

void ofp_options_init(ofp_options* options)
{
    if (!options)
        return;
    *options = ofp_options{};
    options->techniques = nullptr;
    options->seed = 1;
    options->profile = nullptr;
    options->trace_path = nullptr;
    options->log_path = nullptr;
}

ofp_status ofp_scan_sim(const ofp_db* db, const char* scenario, const ofp_options* options,
                        ofp_report** out)
{
    return guarded([&] {
        need(db, "db");
        need(scenario, "scenario");
        need(out, "out");
        const ofp_options o = options ? *options : defaults();
        ofp::ScanOptions so = scan_options_of(o);
        // Simulated controllers are always the shipped models; the caller's
        // database only drives matching.
        auto cfg = ofp::resolve_scenario(scenario, ofp::default_database(),
                                         profile_of(o, ofp::NoiseProfile::Default));
        cfg.record_trace = o.trace_path != nullptr;

        std::ofstream log_file;
        std::optional<ofp::MeasurementLog> log;
        if (o.log_path) {
            log_file = open_out(o.log_path, "measurement log");
            log.emplace(log_file);
            so.log = &*log;
        }
        auto net = ofp::run_scenario(cfg, o.seed);
        std::set<ofp::MacAddress> switch_macs(cfg.switch_macs.begin(), cfg.switch_macs.end());
        auto result = ofp::run_scan(net->attacker(), {cfg.destination(), std::nullopt}, db->sigs,
                                    so, &switch_macs);
        if (o.trace_path) {
            auto f = open_out(o.trace_path, "trace");
            ofp::write_trace(f, net->trace());
        }
        *out = scan_report(result, {cfg.name, o.seed});
    });
}

ofp_status ofp_scan_live(const ofp_db* db, const char* iface, const char* destination,
                         const ofp_options* options, ofp_report** out)
{
    return guarded([&] {
        need(db, "db");
        need(iface, "iface");
        need(destination, "destination");
        need(out, "out");
        const ofp_options o = options ? *options : defaults();
        ofp::ScanOptions so = scan_options_of(o);
        std::ofstream log_file;
        std::optional<ofp::MeasurementLog> log;
        if (o.log_path) {
            log_file = open_out(o.log_path, "measurement log");
            log.emplace(log_file);
            so.log = &*log;
        }
        auto transport = ofp::open_live_transport(iface);
        auto result = ofp::run_scan(*transport, {ofp::Ipv4Address::parse(destination), std::nullopt},
                                    db->sigs, so);
        *out = scan_report(result, {iface, std::nullopt});
    });
}

ofp_status ofp_build_db(ofp_db* db, const char* const* targets, size_t count,
                        const ofp_options* options, ofp_report** out)
{
    return guarded([&] {
        need(db, "db");
        need(out, "out");
        if (count > 0)
            need(targets, "targets");
        const ofp_options o = options ? *options : defaults();
        ofp::ScanOptions so = scan_options_of(o);
        const auto profile = profile_of(o, ofp::NoiseProfile::Minimal);

        // Targets that do not even resolve are reported alongside the
        // measured ones.
        std::vector<ofp::ScenarioConfig> configs;
        std::vector<ofp::BuildOutcome> unresolved;
        std::vector<std::string> order;
        for (size_t i = 0; i < count; ++i) {
            need(targets[i], "target");
            order.push_back(targets[i]);
            try {
                configs.push_back(
                    ofp::resolve_scenario(targets[i], ofp::default_database(), profile));
            } catch (const ofp::Error& e) {
                unresolved.push_back({targets[i], std::nullopt, std::nullopt,
                                      std::string(ofp::to_string(e.code())) + ": " + e.what()});
            }
        }
        auto outcomes = ofp::build_database(db->sigs, configs, so.schedule, o.seed, so.rule);
        outcomes.insert(outcomes.end(), unresolved.begin(), unresolved.end());

        auto* rep = new ofp_report;
        rep->json = ofp::build_report_json(outcomes);
        for (const auto& x : outcomes)
            if (x.error)
                ++rep->failures;
        rep->decided = rep->failures == 0;
        *out = rep;
    });
}

ofp_status ofp_classify_capture(const ofp_db* db, const char* capture_path, ofp_report** out)
{
    return guarded([&] {
        need(db, "db");
        need(capture_path, "capture_path");
        need(out, "out");
        auto frames = ofp::load_capture_dump(capture_path);
        auto r = ofp::classify_capture(frames, db->sigs);
        auto* rep = new ofp_report;
        rep->json = ofp::classify_report_json(r);
        rep->decided = r.decided;
        if (r.decided)
            rep->top = r.analysis.candidates.front().id;
        *out = rep;
    });
}

ofp_status ofp_capture_sim(const ofp_db* db, const char* scenario, const ofp_options* options,
                           double window_s, const char* out_path)
{
    return guarded([&] {
        need(db, "db");
        need(scenario, "scenario");
        need(out_path, "out_path");
        if (!(window_s >= 0))
            throw ofp::Error(ofp::ErrorCode::InvalidArgument, "capture window must be >= 0");
        const ofp_options o = options ? *options : defaults();
        auto cfg = ofp::resolve_scenario(scenario, ofp::default_database(),
                                         profile_of(o, ofp::NoiseProfile::Default));
        auto net = ofp::run_scenario(cfg, o.seed);
        const std::uint16_t types[] = {ofp::kEthertypeLldp, ofp::kEthertypeBddp};
        auto frames = net->attacker().capture_frames(types, ofp::Seconds{window_s});
        auto f = open_out(out_path, "capture");
        f << "# ofprint capture: " << cfg.name << " seed " << o.seed << "\n";
        ofp::write_capture_dump(f, frames);
    });
}

int ofp_report_decided(const ofp_report* report)
{
    return report && report->decided ? 1 : 0;
}

const char* ofp_report_top(const ofp_report* report)
{
    return report && !report->top.empty() ? report->top.c_str() : nullptr;
}

size_t ofp_report_failures(const ofp_report* report)
{
    return report ? report->failures : 0;
}

const char* ofp_report_json(const ofp_report* report)
{
    return report ? report->json.c_str() : "";
}

void ofp_report_free(ofp_report* report)
{
    delete report;
}

} // extern "C"
