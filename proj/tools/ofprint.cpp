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

// ofprint command line. Talks to the library only through its C API.
//
// Exit status: 0 decided, 2 undecided, 1 error.

#include "ofprint/ofprint.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitDecided = 0;
constexpr int kExitError = 1;
constexpr int kExitUndecided = 2;

struct DbDeleter {
    void operator()(ofp_db* p) const { ofp_db_free(p); }
};
struct ReportDeleter {
    void operator()(ofp_report* p) const { ofp_report_free(p); }
};
using DbPtr = std::unique_ptr<ofp_db, DbDeleter>;
using ReportPtr = std::unique_ptr<ofp_report, ReportDeleter>;

struct Failure {
    ofp_status status;
};

void check(ofp_status st)
{
    if (st != OFP_OK)
        throw Failure{st};
}

// Durations need a unit so that seconds and milliseconds cannot be mixed up.
double parse_duration_s(const std::string& text)
{
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw CLI::ValidationError("duration", "'" + text + "' is not a duration");
    }
    std::string unit = text.substr(pos);
    if (unit == "ms")
        return v / 1000.0;
    if (unit == "s")
        return v;
    if (unit == "min")
        return v * 60.0;
    throw CLI::ValidationError("duration",
                               "'" + text + "' needs a unit suffix: ms, s or min (e.g. 5ms, 10s)");
}

std::optional<std::string> env_db()
{
    if (const char* p = std::getenv("OFPRINT_DB"); p && *p)
        return std::string(p);
    return std::nullopt;
}

DbPtr open_db(const std::optional<std::string>& path)
{
    ofp_db* db = nullptr;
    if (path)
        check(ofp_db_load(path->c_str(), &db));
    else
        check(ofp_db_default(&db));
    return DbPtr(db);
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        std::cerr << "ofprint: cannot write '" << path << "'\n";
        throw Failure{OFP_E_IO};
    }
    f << text;
}

struct Common {
    std::optional<std::string> db;
    std::optional<std::string> out;
    std::uint64_t seed = 1;
    std::optional<std::string> profile;
};

struct ScanArgs {
    std::optional<std::string> sim;
    std::optional<std::string> live;
    std::optional<std::string> dest;
    std::optional<std::string> only;
    bool all = false;
    int n = 0;
    int m = 0;
    std::optional<std::string> step, period, wait_cap, lldp_window;
    std::optional<std::string> trace, log;
};

void fill_timing(ofp_options& o, const ScanArgs& a)
{
    o.n = a.n;
    o.m = a.m;
    if (a.step)
        o.step_s = parse_duration_s(*a.step);
    if (a.period)
        o.period_s = parse_duration_s(*a.period);
    if (a.wait_cap)
        o.wait_cap_s = parse_duration_s(*a.wait_cap);
    if (a.lldp_window)
        o.lldp_window_s = parse_duration_s(*a.lldp_window);
}

void print_summary(const ofp_report* rep)
{
    if (ofp_report_decided(rep))
        std::cerr << "decided: " << ofp_report_top(rep) << "\n";
    else
        std::cerr << "undecided\n";
}

int run_scan(const Common& c, const ScanArgs& a)
{
    DbPtr db = open_db(c.db ? c.db : env_db());
    ofp_options o;
    ofp_options_init(&o);
    o.seed = c.seed;
    fill_timing(o, a);
    if (a.only && !a.all)
        o.techniques = a.only->c_str();
    if (c.profile)
        o.profile = c.profile->c_str();
    if (a.trace)
        o.trace_path = a.trace->c_str();
    if (a.log)
        o.log_path = a.log->c_str();

    ofp_report* raw = nullptr;
    if (a.sim) {
        check(ofp_scan_sim(db.get(), a.sim->c_str(), &o, &raw));
    } else {
        if (!a.dest) {
            std::cerr << "ofprint: --live needs --dest <ipv4>\n";
            return kExitError;
        }
        check(ofp_scan_live(db.get(), a.live->c_str(), a.dest->c_str(), &o, &raw));
    }
    ReportPtr rep(raw);
    if (c.out)
        write_text(*c.out, ofp_report_json(rep.get()));
    else
        std::cout << ofp_report_json(rep.get());
    print_summary(rep.get());
    return ofp_report_decided(rep.get()) ? kExitDecided : kExitUndecided;
}

int run_build(const Common& c, const std::vector<std::string>& targets, const ScanArgs& a,
              const std::optional<std::string>& report_path)
{
    // Merge base: an explicit database, else the output file when it
    // exists, else the built-in one.
    std::optional<std::string> base = c.db ? c.db : env_db();
    if (!base && std::filesystem::exists(*c.out))
        base = *c.out;
    DbPtr db = open_db(base);

    ofp_options o;
    ofp_options_init(&o);
    o.seed = c.seed;
    fill_timing(o, a);
    if (c.profile)
        o.profile = c.profile->c_str();
    std::vector<const char*> argv;
    for (const auto& t : targets)
        argv.push_back(t.c_str());

    ofp_report* raw = nullptr;
    check(ofp_build_db(db.get(), argv.data(), argv.size(), &o, &raw));
    ReportPtr rep(raw);
    check(ofp_db_save(db.get(), c.out->c_str()));
    if (report_path)
        write_text(*report_path, ofp_report_json(rep.get()));
    else
        std::cout << ofp_report_json(rep.get());
    std::size_t failures = ofp_report_failures(rep.get());
    if (failures > 0) {
        std::cerr << "ofprint: " << failures << " of " << targets.size()
                  << " target(s) failed; partial database written to " << *c.out << "\n";
        return kExitError;
    }
    return kExitDecided;
}

int run_classify(const Common& c, const std::string& capture)
{
    DbPtr db = open_db(c.db ? c.db : env_db());
    ofp_report* raw = nullptr;
    check(ofp_classify_capture(db.get(), capture.c_str(), &raw));
    ReportPtr rep(raw);
    if (c.out)
        write_text(*c.out, ofp_report_json(rep.get()));
    else
        std::cout << ofp_report_json(rep.get());
    print_summary(rep.get());
    return ofp_report_decided(rep.get()) ? kExitDecided : kExitUndecided;
}

int run_capture(const Common& c, const std::string& sim, const std::string& window)
{
    DbPtr db = open_db(c.db ? c.db : env_db());
    ofp_options o;
    ofp_options_init(&o);
    o.seed = c.seed;
    if (c.profile)
        o.profile = c.profile->c_str();
    check(ofp_capture_sim(db.get(), sim.c_str(), &o, parse_duration_s(window), c.out->c_str()));
    return kExitDecided;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ofprint: fingerprint the OpenFlow controller behind a data plane"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ofp_version());

    Common common;
    ScanArgs scan;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--db", common.db, "signature database (default: $OFPRINT_DB or built-in)");
        sub->add_option("--seed", common.seed, "simulation seed");
        sub->add_option("--profile", common.profile, "simulated noise profile: default, noisy, minimal");
    };
    auto add_timing = [&](CLI::App* sub) {
        sub->add_option("--n", scan.n, "baseline / database sample count (default 100)");
        sub->add_option("--step", scan.step, "idle search step, e.g. 5ms");
        sub->add_option("--period", scan.period, "spacing of table-miss probes, e.g. 11s");
        sub->add_option("--wait-cap", scan.wait_cap, "infinite-timeout bound, e.g. 360s");
    };

    auto* s = app.add_subcommand("scan", "fingerprint a simulated or live network");
    add_common(s);
    add_timing(s);
    auto* sim_opt = s->add_option("--sim", scan.sim, "scenario: controller id, alias or file");
    auto* live_opt = s->add_option("--live", scan.live, "network interface for the live backend");
    sim_opt->excludes(live_opt);
    s->add_option("--dest", scan.dest, "probe destination (live backend)");
    auto* only = s->add_option("--only", scan.only, "techniques: lldp,timeout,processing-time,arp");
    auto* all = s->add_flag("--all", scan.all, "run every technique (default)");
    only->excludes(all);
    s->add_option("--out", common.out, "report path (default: stdout)");
    s->add_option("--m", scan.m, "fingerprint sample count (default 20)");
    s->add_option("--lldp-window", scan.lldp_window, "passive capture window, e.g. 600s");
    s->add_option("--trace", scan.trace, "write the simulated event trace here");
    s->add_option("--log", scan.log, "write per-probe measurements (JSON lines) here");

    std::vector<std::string> targets;
    std::optional<std::string> build_report;
    auto* b = app.add_subcommand("build-db", "measure processing times and merge them into a database");
    add_common(b);
    add_timing(b);
    b->add_option("targets", targets, "scenarios (controller ids, aliases or files)")->required();
    b->add_option("--out", common.out, "database to write")->required();
    b->add_option("--report", build_report, "per-target listing (default: stdout)");

    std::string capture_path;
    auto* c = app.add_subcommand("classify-capture", "classify an LLDP capture dump offline");
    c->add_option("capture", capture_path, "dump file: '<timestamp_us> <hex>' per line")->required();
    c->add_option("--db", common.db, "signature database (default: $OFPRINT_DB or built-in)");
    c->add_option("--out", common.out, "report path (default: stdout)");

    std::string cap_sim;
    std::string cap_window = "600s";
    auto* cap = app.add_subcommand("capture", "dump simulated discovery traffic");
    add_common(cap);
    cap->add_option("--sim", cap_sim, "scenario: controller id, alias or file")->required();
    cap->add_option("--window", cap_window, "capture length, e.g. 600s");
    cap->add_option("--out", common.out, "dump file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    try {
        if (*s) {
            if (!scan.sim && !scan.live) {
                std::cerr << "ofprint: scan needs --sim <scenario> or --live <iface>\n";
                return kExitError;
            }
            return run_scan(common, scan);
        }
        if (*b)
            return run_build(common, targets, scan, build_report);
        if (*c)
            return run_classify(common, capture_path);
        if (*cap)
            return run_capture(common, cap_sim, cap_window);
    } catch (const Failure& f) {
        std::cerr << "ofprint: " << ofp_status_string(f.status);
        if (*ofp_last_error())
            std::cerr << ": " << ofp_last_error();
        std::cerr << "\n";
        return kExitError;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "ofprint: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
