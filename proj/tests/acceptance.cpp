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

// Acceptance gate: one PASS/FAIL line per criterion, everything in
// simulation against configured ground truth. Exit status 0 iff all pass.

#include "ofprint/scan.hpp"

#include "properties.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace ofp;
using ofp::test::db;
using ofp::test::model_of;
using ofp::test::secs;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point since)
{
    return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string fmt(double v, int prec = 3)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

std::string join(const std::set<ControllerId>& ids)
{
    std::string out = "{";
    for (const auto& id : ids)
        out += (out.size() > 1 ? "," : "") + id;
    return out + "}";
}

struct Session {
    std::unique_ptr<Simnet> net;
    TimingContext ctx;

    Session(const ScenarioConfig& cfg, std::uint64_t seed, ProbeSchedule schedule = {})
        : net(run_scenario(cfg, seed)),
          ctx(net->attacker(), ProbeTarget{cfg.destination(), std::nullopt}, schedule)
    { }
};

// 1. Timeout inference accuracy on the noisy POX model.
Verdict timeout_accuracy()
{
    const auto start = Clock::now();
    int idle_errors = 0, idle_trials = 0, hard_errors = 0, hard_trials = 0;
    double worst_idle = 0, worst_hard = 0;
    std::uint64_t seed = 1000;

    for (int idle = 5; idle <= 30; idle += 5) {
        for (int run = 0; run < 10; ++run, ++idle_trials) {
            // Hard timeout off so the idle search sees the idle expiry only.
            auto m = model_of("pox");
            m.idle = secs(idle);
            m.hard = Timeout::infinite();
            Session s(make_scenario(m, NoiseProfile::Noisy), ++seed);
            double got = -1;
            try {
                auto b = measure_baseline(s.ctx);
                auto est = infer_idle_timeout(s.ctx, b);
                got = est.idle.is_infinite() ? 1e9 : est.idle.seconds().count();
            } catch (const Error&) {
            }
            double dev = std::abs(got - idle);
            worst_idle = std::max(worst_idle, std::min(dev, 1e6));
            if (dev > 1.0)
                ++idle_errors;
        }
    }
    for (int hard = 10; hard <= 60; hard += 10) {
        for (int run = 0; run < 10; ++run, ++hard_trials) {
            auto m = model_of("pox"); // idle 10 s, keep-alive 5 s
            m.hard = secs(hard);
            Session s(make_scenario(m, NoiseProfile::Noisy), ++seed);
            double got = -1;
            try {
                auto b = measure_baseline(s.ctx);
                auto idle = infer_idle_timeout(s.ctx, b);
                auto h = infer_hard_timeout(s.ctx, b, idle);
                got = h.is_infinite() ? 1e9 : h.seconds().count();
            } catch (const Error&) {
            }
            double dev = std::abs(got - hard);
            worst_hard = std::max(worst_hard, std::min(dev, 1e6));
            if (dev > 1.0)
                ++hard_errors;
        }
    }
    const double wall = elapsed_s(start);
    Verdict v;
    v.pass = idle_errors <= 2 && hard_errors == 0 && wall < 60;
    v.detail = "idle errors " + std::to_string(idle_errors) + "/" + std::to_string(idle_trials) +
               " (worst " + fmt(worst_idle) + " s), hard errors " + std::to_string(hard_errors) +
               "/" + std::to_string(hard_trials) + " (worst " + fmt(worst_hard) + " s), wall " +
               fmt(wall, 1) + " s";
    return v;
}

// 2. Published timeouts recovered from each controller model.
Verdict timeout_table()
{
    const std::map<std::string, std::set<ControllerId>> expected_sets = {
        {"pox", {"pox"}},
        {"floodlight", {"floodlight", "beacon"}},
        {"beacon", {"floodlight", "beacon"}},
        {"ryu", {"ryu", "opendaylight-lithium-helium", "opendaylight-hydrogen"}},
        {"opendaylight-lithium-helium",
         {"ryu", "opendaylight-lithium-helium", "opendaylight-hydrogen"}},
        {"opendaylight-hydrogen", {"ryu", "opendaylight-lithium-helium", "opendaylight-hydrogen"}},
    };
    Verdict v{true, ""};
    std::uint64_t seed = 2000;
    for (const auto& [id, want] : expected_sets) {
        const auto* sig = find_signature(db(), id);
        Session s(make_scenario(ControllerModel::from_signature(*sig), NoiseProfile::Default),
                  ++seed);
        const double step = s.ctx.schedule.step.count();
        auto close = [&](const Timeout& got, const Timeout& truth) {
            if (truth.is_infinite() || got.is_infinite())
                return truth.is_infinite() && got.is_infinite();
            return std::abs(got.seconds().count() - truth.seconds().count()) <= step + 1e-9;
        };
        std::string line;
        try {
            auto b = measure_baseline(s.ctx);
            auto est = infer_idle_timeout(s.ctx, b);
            est.hard = infer_hard_timeout(s.ctx, b, est);
            auto set = match_timeouts(est, db());
            bool ok = close(est.idle, sig->timeouts.idle) && close(*est.hard, sig->timeouts.hard) &&
                      set == want;
            line = id + " " + to_string(est.idle) + "/" + to_string(*est.hard) + " -> " +
                   join(set);
            if (!ok) {
                v.pass = false;
                line += " (expected " + to_string(sig->timeouts.idle) + "/" +
                        to_string(sig->timeouts.hard) + " -> " + join(want) + ")";
            }
        } catch (const Error& e) {
            v.pass = false;
            line = id + " error: " + e.what();
        }
        v.detail += (v.detail.empty() ? "" : "; ") + line;
    }
    return v;
}

// 3. Processing-time database rebuilt on the minimal-latency scenario.
Verdict processing_table()
{
    SignatureDatabase built = db();
    std::vector<ScenarioConfig> targets;
    const char* ids[] = {"beacon", "floodlight", "opendaylight-lithium-helium", "pox", "ryu"};
    for (const char* id : ids)
        targets.push_back(make_scenario(model_of(id), NoiseProfile::Minimal));
    ProbeSchedule schedule; // n = 100
    auto outcomes = build_database(built, targets, schedule, 3000);

    Verdict v{true, ""};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const double truth = targets[i].controller.processing_delay.count();
        std::string line = targets[i].controller.id + " ";
        if (o.error || !o.record) {
            v.pass = false;
            line += "error " + o.error.value_or("?");
        } else {
            double got = o.record->t_p_adjusted.count();
            double raw_ref = find_signature(db(), targets[i].controller.id)->processing.t_p.count();
            line += fmt(got) + " vs " + fmt(truth) + " (raw " + fmt(o.record->t_p.count()) + " vs " +
                    fmt(raw_ref) + ")";
            if (std::abs(got - truth) > 0.3) {
                v.pass = false;
                line += " OUT";
            }
        }
        v.detail += (v.detail.empty() ? "" : "; ") + line;
    }
    return v;
}

// 4. Beacon is ambiguous with Floodlight, POX is unique.
Verdict processing_ambiguity()
{
    Verdict v{true, ""};
    {
        Session s(make_scenario(model_of("beacon"), NoiseProfile::Default), 4001);
        auto b = measure_baseline(s.ctx);
        auto fp = fingerprint_by_processing_time(s.ctx, b, secs(5), db());
        std::set<ControllerId> ids;
        bool all_ambiguous = !fp.matches.empty();
        for (const auto& m : fp.matches) {
            ids.insert(m.id);
            all_ambiguous = all_ambiguous && m.ambiguous;
        }
        bool ok = ids == std::set<ControllerId>{"beacon", "floodlight"} && all_ambiguous;
        v.pass = v.pass && ok;
        v.detail += "beacon adjusted " + fmt(fp.adjusted.count()) + " ms -> " + join(ids) +
                    (all_ambiguous ? " ambiguous" : " NOT ambiguous");
    }
    {
        Session s(make_scenario(model_of("pox"), NoiseProfile::Default), 4002);
        auto b = measure_baseline(s.ctx);
        auto fp = fingerprint_by_processing_time(s.ctx, b, secs(10), db());
        bool ok = fp.matches.size() == 1 && fp.matches[0].id == "pox" && !fp.matches[0].ambiguous;
        // Gap to the next-nearest database entry.
        double next = 1e9;
        for (const auto& sig : db())
            if (sig.id != "pox")
                next = std::min(next, std::abs(sig.processing.t_p_adjusted.count() - 33.439));
        ok = ok && next > 29;
        v.pass = v.pass && ok;
        v.detail += "; pox adjusted " + fmt(fp.adjusted.count()) + " ms -> " +
                    (fp.matches.empty() ? std::string("{}") : fp.matches[0].id) +
                    " unique, next entry " + fmt(next) + " ms away";
    }
    return v;
}

// 5. LLDP profiles from ten virtual minutes, 20 seeds each.
Verdict lldp_classification()
{
    int wrong = 0, total = 0;
    std::string misses;
    for (const auto& sig : db()) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed, ++total) {
            Simnet net(make_scenario(ControllerModel::from_signature(sig), NoiseProfile::Default),
                       5000 + seed);
            const std::uint16_t types[] = {kEthertypeLldp, kEthertypeBddp};
            auto frames = net.attacker().capture_frames(types, Seconds{600});
            auto a = analyze_lldp_capture(frames, db());
            if (a.candidates.size() != 1 || a.candidates[0].id != sig.id) {
                ++wrong;
                if (misses.size() < 200) {
                    std::set<ControllerId> ids;
                    for (const auto& c : a.candidates)
                        ids.insert(c.id);
                    misses += " " + sig.id + "#" + std::to_string(seed) + "->" + join(ids);
                }
            }
        }
    }
    return {wrong == 0, std::to_string(total - wrong) + "/" + std::to_string(total) +
                            " captures classified to exactly their profile" + misses};
}

// 6. ARP duplicate detector.
Verdict arp_detector()
{
    int fp = 0, fn = 0, total = 0;
    for (const auto& sig : db()) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed, ++total) {
            auto cfg = make_scenario(ControllerModel::from_signature(sig), NoiseProfile::Noisy);
            Simnet net(cfg, 6000 + seed);
            auto& t = net.attacker();
            const auto unknown = Ipv4Address::parse("10.0.0.254");
            auto frames = t.send_arp_probe(unknown, Seconds{1});
            ArpPacket sent{1, t.local_mac(), t.local_address(), MacAddress{}, unknown};
            std::set<MacAddress> sw(cfg.switch_macs.begin(), cfg.switch_macs.end());
            bool seen = detect_arp_rebroadcast(frames, sent, t.local_mac(), &sw);
            if (seen && !sig.arp_rebroadcast)
                ++fp;
            if (!seen && sig.arp_rebroadcast)
                ++fn;
        }
    }
    return {fp == 0 && fn == 0, std::to_string(total) + " probes, " + std::to_string(fp) +
                                    " false positives, " + std::to_string(fn) +
                                    " false negatives"};
}

// 7. Full scans on the noisy profile.
Verdict end_to_end()
{
    Verdict v{true, ""};
    for (const auto& sig : db()) {
        int correct = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto cfg = make_scenario(ControllerModel::from_signature(sig), NoiseProfile::Noisy);
            Simnet net(cfg, seed);
            std::set<MacAddress> sw(cfg.switch_macs.begin(), cfg.switch_macs.end());
            try {
                auto r = run_scan(net.attacker(), {cfg.destination(), std::nullopt}, db(),
                                  ScanOptions{}, &sw);
                if (r.verdict.decided && r.verdict.ranking[0].id == sig.id)
                    ++correct;
            } catch (const Error&) {
            }
        }
        if (correct < 19)
            v.pass = false;
        v.detail += (v.detail.empty() ? "" : ", ") + sig.id + " " + std::to_string(correct) + "/20";
    }
    return v;
}

// 8. Property suites, at least 100 cases each.
Verdict properties()
{
    struct Suite {
        const char* name;
        prop::Outcome outcome;
    };
    std::vector<Suite> suites = {
        {"determinism", prop::simnet_determinism(100, 0xacc0001)},
        {"expiry-audit", prop::expiry_audit(100, 0xacc0002)},
        {"lldp-round-trip", prop::lldp_round_trip(100, 0xacc0003)},
        {"interval-shift", prop::interval_shift_invariance(100, 0xacc0004)},
        {"fusion-order", prop::fusion_order_independence(100, 0xacc0005)},
    };
    Verdict v{true, ""};
    for (const auto& s : suites) {
        bool ok = s.outcome.ok() && s.outcome.cases >= 100;
        v.pass = v.pass && ok;
        v.detail += (v.detail.empty() ? "" : ", ") + std::string(s.name) + " " +
                    std::to_string(s.outcome.cases - int(s.outcome.failures.size())) + "/" +
                    std::to_string(s.outcome.cases);
        for (const auto& f : s.outcome.failures)
            v.detail += " [" + f + "]";
    }
    return v;
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"timeout inference accuracy (noisy POX)", timeout_accuracy},
        {"timeout table recovery", timeout_table},
        {"processing-time table recovery", processing_table},
        {"processing-time ambiguity", processing_ambiguity},
        {"LLDP classification", lldp_classification},
        {"ARP rebroadcast detector", arp_detector},
        {"end-to-end scan (noisy)", end_to_end},
        {"property suites", properties},
    };
    int failed = 0, index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto start = Clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass)
            ++failed;
        std::printf("%s criterion %d: %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", index, name,
                    v.detail.c_str(), elapsed_s(start));
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
