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

#include "ofprint/timing.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

namespace ofp {

std::size_t RttStats::received() const
{
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const RttSample& s) { return !s.lost(); }));
}

RttStats summarize_rtt(std::vector<RttSample> samples, int n)
{
    RttStats st;
    st.samples = std::move(samples);
    st.n = n;
    std::vector<double> v;
    for (const auto& s : st.samples)
        if (s.rtt)
            v.push_back(s.rtt->count());
    const std::size_t need = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(0.8 * n)));
    if (v.size() < need)
        throw Error(ErrorCode::InsufficientSamples,
                    std::to_string(v.size()) + " of " + std::to_string(n) +
                        " probes answered; need " + std::to_string(need));
    double sum = 0;
    for (double x : v)
        sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    st.rtt_avg = Millis{mean};
    st.rtt_std = Millis{std::sqrt(ss / static_cast<double>(v.size() - 1))};
    return st;
}

void ProbeSchedule::validate() const
{
    auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
    if (n < 3)
        bad("n must be >= 3");
    if (m < 1)
        bad("m must be >= 1");
    if (!(step.count() > 0))
        bad("step must be > 0");
    if (wait_initial.count() < 0)
        bad("initial wait must be >= 0");
    if (!(wait_cap > wait_initial))
        bad("wait cap must exceed the initial wait");
    if (period && !(period->count() > 0))
        bad("period must be > 0");
    if (keepalive && !(keepalive->count() > 0))
        bad("keep-alive wait must be > 0");
    if (!(hard_cap.count() > 0))
        bad("hard cap must be > 0");
    if (!(resolution.count() > 0) || resolution > step)
        bad("resolution must be in (0, step]");
    if (retries < 0 || flip_budget < 0)
        bad("retries and flip budget must be >= 0");
}

bool entry_present(Millis t_ping, const RttStats& baseline, const DecisionRule& rule)
{
    const double margin = std::max(rule.k * baseline.rtt_std.count(), rule.floor.count());
    return t_ping.count() <= baseline.rtt_avg.count() + margin;
}

void MeasurementLog::record(std::string_view phase, const RttSample& s,
                            std::optional<Seconds> wait, std::string_view decision)
{
    nlohmann::ordered_json j;
    j["phase"] = phase;
    j["sequence"] = s.sequence;
    j["sent_at_ns"] = s.sent_at.count();
    j["wait_s"] = wait ? nlohmann::ordered_json(wait->count()) : nlohmann::ordered_json();
    j["rtt_ms"] = s.rtt ? nlohmann::ordered_json(s.rtt->count()) : nlohmann::ordered_json();
    j["decision"] = decision;
    os_ << j.dump() << '\n';
}

namespace {

// Everything below works on one context; the helpers keep the algorithms
// readable.
class Prober {
public:
    Prober(TimingContext& ctx, const RttStats* baseline) : ctx_(ctx), base_(baseline) { }

    ProbeTarget fresh_flow()
    {
        constexpr std::uint32_t kPoolBase = (198u << 24) | (18u << 16);
        constexpr std::uint32_t kPoolSize = 1u << 17;
        ProbeTarget t = ctx_.target;
        std::uint32_t i = ctx_.fresh_flows++ % (kPoolSize - 2);
        t.spoof_source = Ipv4Address{kPoolBase + 1 + i};
        return t;
    }

    // One probe with the retry policy. Nullopt when every attempt was lost.
    std::optional<RttSample> probe(const ProbeTarget& t, std::string_view phase,
                                   std::optional<Seconds> wait)
    {
        for (int attempt = 0; attempt <= ctx_.schedule.retries; ++attempt) {
            RttSample s = ctx_.transport.send_probe(t);
            if (s.lost()) {
                log(phase, s, wait, "lost");
                continue;
            }
            log(phase, s, wait, present(s) ? "present" : "absent");
            return s;
        }
        return std::nullopt;
    }

    bool present(const RttSample& s) const
    {
        return base_ && s.rtt && entry_present(*s.rtt, *base_, ctx_.rule);
    }

    // When the entry behind `s` started its idle clock.
    Timestamp anchor_of(const RttSample& s) const
    {
        if (!s.rtt || present(s))
            return s.sent_at;
        double excess = s.rtt->count() - base_->rtt_avg.count();
        return s.sent_at + to_timestamp(Millis{std::max(0.0, excess)});
    }

    // Installs a fresh flow; returns it with its anchor.
    std::pair<ProbeTarget, Timestamp> install_fresh(std::string_view phase)
    {
        for (int attempt = 0; attempt <= ctx_.schedule.retries; ++attempt) {
            ProbeTarget t = fresh_flow();
            RttSample s = ctx_.transport.send_probe(t);
            log(phase, s, std::nullopt, s.lost() ? "lost" : "install");
            if (!s.lost())
                return {t, anchor_of(s)};
        }
        throw Error(ErrorCode::ProbeLost, "could not install a probe flow: every attempt lost");
    }

    // Does an entry installed on a fresh flow survive `wait` of silence?
    std::optional<bool> fresh_trial(Seconds wait, std::string_view phase)
    {
        auto [flow, anchor] = install_fresh(phase);
        ctx_.transport.sleep_until(anchor + to_timestamp(wait));
        auto s = probe(flow, phase, wait);
        if (!s)
            return std::nullopt;
        return present(*s);
    }

    void log(std::string_view phase, const RttSample& s, std::optional<Seconds> wait,
             std::string_view decision)
    {
        if (ctx_.log)
            ctx_.log->record(phase, s, wait, decision);
    }

private:
    TimingContext& ctx_;
    const RttStats* base_;
};

// Drops binary-search float residue below a microsecond.
Seconds tidy(Seconds s)
{
    return Seconds{std::round(s.count() * 1e6) / 1e6};
}

[[noreturn]] void inconsistent(const std::string& what)
{
    throw Error(ErrorCode::InconsistentEnvironment, what);
}

} // namespace

RttStats measure_baseline(TimingContext& ctx)
{
    ctx.schedule.validate();
    Prober p(ctx, nullptr);
    // The first probe installs the entry and is not part of the statistics.
    std::optional<RttSample> first = p.probe(ctx.target, "install", std::nullopt);
    std::vector<RttSample> samples;
    samples.reserve(static_cast<std::size_t>(ctx.schedule.n));
    for (int i = 0; i < ctx.schedule.n; ++i) {
        RttSample s = ctx.transport.send_probe(ctx.target);
        p.log("baseline", s, std::nullopt, s.lost() ? "lost" : "sample");
        samples.push_back(s);
    }
    RttStats st = summarize_rtt(std::move(samples), ctx.schedule.n);
    for (auto it = st.samples.rbegin(); it != st.samples.rend(); ++it)
        if (!it->lost()) {
            ctx.anchor = it->sent_at;
            break;
        }
    (void)first;
    return st;
}

TimeoutEstimate infer_idle_timeout(TimingContext& ctx, const RttStats& baseline)
{
    const ProbeSchedule& sch = ctx.schedule;
    sch.validate();
    Prober p(ctx, &baseline);
    TimeoutEstimate est;
    Seconds wait = std::max(sch.wait_initial, sch.step);
    int flips = 0;
    ProbeTarget walk = ctx.target;

    for (;;) {
        if (wait > sch.wait_cap) {
            est.idle = Timeout::infinite();
            est.resolution = sch.step;
            return est;
        }
        ++est.iterations;
        ctx.transport.sleep_until(ctx.anchor + to_timestamp(wait));
        auto s = p.probe(walk, "idle-walk", wait);
        if (s && p.present(*s)) {
            ctx.anchor = s->sent_at;
            flips = 0;
            wait += sch.step;
            continue;
        }
        // Looks expired. The probe re-installed the entry; before believing
        // it, check the same wait on a flow nobody else touches, so a lost
        // probe or a hard expiry on the target flow cannot end the walk.
        ++est.iterations;
        auto confirmed = p.fresh_trial(wait, "idle-confirm");
        if (confirmed && !*confirmed)
            break;
        if (++flips > sch.flip_budget)
            inconsistent("idle timeout search: expiry at " + std::to_string(wait.count()) +
                         " s not reproducible after " + std::to_string(flips) + " attempts");
        // Continue on a newly installed flow: probing the old one again could
        // refresh an entry whose hard deadline is what just ended it.
        std::tie(walk, ctx.anchor) = p.install_fresh("idle-rearm");
    }

    Seconds lo = std::max(Seconds{0}, wait - sch.step);
    Seconds hi = wait;
    if (sch.refine) {
        int lost_trials = 0;
        while (hi - lo > sch.resolution) {
            Seconds mid = (lo + hi) / 2.0;
            ++est.iterations;
            auto alive = p.fresh_trial(mid, "idle-refine");
            if (!alive) {
                if (++lost_trials > sch.flip_budget)
                    throw Error(ErrorCode::ProbeLost, "idle timeout refinement: probes lost");
                continue;
            }
            (*alive ? lo : hi) = mid;
        }
    }
    est.idle = Timeout::finite(tidy(std::max(hi, sch.resolution)));
    est.resolution = hi - lo;
    return est;
}

Timeout infer_hard_timeout(TimingContext& ctx, const RttStats& baseline,
                           const TimeoutEstimate& idle)
{
    const ProbeSchedule& sch = ctx.schedule;
    sch.validate();
    if (!idle.idle.is_infinite() && !(idle.idle.seconds() > 2.0 * sch.step))
        throw Error(ErrorCode::InvalidArgument, "hard timeout search needs idle > 2 * step");
    Seconds wait = sch.keepalive ? *sch.keepalive
                   : idle.idle.is_infinite() ? Seconds{5.0}
                                             : idle.idle.seconds() / 2.0;
    if (!idle.idle.is_infinite() && !(wait < idle.idle.seconds()))
        throw Error(ErrorCode::InvalidArgument, "keep-alive wait must be below the idle timeout");

    Prober p(ctx, &baseline);

    // Keeps a fresh entry alive with probes every `wait` and reports the
    // first multiple of `wait` at which it is gone (nullopt past the cap).
    // `last` adds a final probe at `last` instead of the next multiple.
    int flips = 0;
    auto run = [&](std::optional<Seconds> last,
                   std::string_view phase) -> std::optional<std::pair<Seconds, bool>> {
        for (;;) {
            auto [flow, anchor] = p.install_fresh(phase);
            Seconds accumulated{0};
            bool restart = false;
            for (;;) {
                Seconds next = accumulated + wait;
                bool final_probe = last && next >= *last;
                if (final_probe)
                    next = *last;
                ctx.transport.sleep_until(anchor + to_timestamp(next));
                auto s = p.probe(flow, phase, next);
                if (!s) {
                    restart = true;
                    break;
                }
                bool alive = p.present(*s);
                if (final_probe)
                    return std::pair{next, alive};
                if (!alive)
                    return std::pair{next, false};
                accumulated = next;
                if (!last && accumulated > sch.hard_cap)
                    return std::nullopt;
            }
            if (restart && ++flips > sch.flip_budget)
                inconsistent("hard timeout search: keep-alive probes keep getting lost");
        }
    };

    auto first = run(std::nullopt, "hard-accumulate");
    if (!first)
        return Timeout::infinite();
    Seconds hi = first->first;
    Seconds lo = hi - wait;
    if (!sch.refine)
        return Timeout::finite(tidy(std::max(lo, sch.resolution)));
    while (hi - lo > sch.resolution) {
        Seconds mid = (lo + hi) / 2.0;
        auto r = run(mid, "hard-refine");
        (r && r->second ? lo : hi) = mid;
    }
    return Timeout::finite(tidy(hi));
}

namespace {

// Mean RTT of `count` probes that each miss the flow table.
std::vector<RttSample> collect_misses(TimingContext& ctx, const RttStats& baseline,
                                      const Timeout& idle, int count, std::string_view phase)
{
    const ProbeSchedule& sch = ctx.schedule;
    Prober p(ctx, &baseline);
    std::vector<RttSample> out;
    if (idle.is_infinite()) {
        // The entry never expires on its own, so every probe uses a flow the
        // switch has not seen yet.
        for (int i = 0; i < count; ++i) {
            if (sch.period && i > 0)
                ctx.transport.sleep_for(*sch.period);
            for (int attempt = 0;; ++attempt) {
                RttSample s = ctx.transport.send_probe(p.fresh_flow());
                p.log(phase, s, std::nullopt, s.lost() ? "lost" : "sample");
                if (!s.lost()) {
                    out.push_back(s);
                    break;
                }
                if (attempt >= sch.retries)
                    throw Error(ErrorCode::ProbeLost, "miss probe lost after retries");
            }
        }
        return out;
    }
    Seconds period = sch.period ? *sch.period : idle.seconds() + Seconds{1.0};
    if (period <= idle.seconds())
        throw Error(ErrorCode::PeriodTooSmall,
                    "period " + std::to_string(period.count()) +
                        " s must exceed the idle timeout " + std::to_string(idle.seconds().count()) +
                        " s");
    for (int i = 0; i < count; ++i) {
        for (int attempt = 0;; ++attempt) {
            ctx.transport.sleep_until(ctx.anchor + to_timestamp(period));
            RttSample s = ctx.transport.send_probe(ctx.target);
            p.log(phase, s, period, s.lost() ? "lost" : "sample");
            ctx.anchor = s.sent_at;
            if (!s.lost()) {
                ctx.anchor = p.anchor_of(s);
                out.push_back(s);
                break;
            }
            if (attempt >= sch.retries)
                throw Error(ErrorCode::ProbeLost, "miss probe lost after retries");
        }
    }
    return out;
}

Millis mean_rtt(const std::vector<RttSample>& v)
{
    double sum = 0;
    for (const auto& s : v)
        sum += s.rtt->count();
    return Millis{v.empty() ? 0.0 : sum / static_cast<double>(v.size())};
}

} // namespace

ProcessingTimeRecord build_processing_time_record(TimingContext& ctx, const RttStats& baseline,
                                                  const Timeout& idle)
{
    ctx.schedule.validate();
    auto misses = collect_misses(ctx, baseline, idle, ctx.schedule.n, "tp-build");
    Millis t_pavg = mean_rtt(misses);
    Millis adjusted{std::max(0.0, t_pavg.count() - baseline.rtt_avg.count())};
    return {t_pavg, adjusted};
}

ProcessingFingerprint fingerprint_by_processing_time(TimingContext& ctx, const RttStats& baseline,
                                                     const Timeout& idle,
                                                     const SignatureDatabase& db, Millis tolerance)
{
    ctx.schedule.validate();
    auto misses = collect_misses(ctx, baseline, idle, ctx.schedule.m, "tp-fingerprint");
    ProcessingFingerprint fp;
    fp.rtt_prime = mean_rtt(misses);
    fp.adjusted = Millis{std::max(0.0, fp.rtt_prime.count() - baseline.rtt_avg.count())};
    fp.matches = match_processing_time(fp.adjusted, db, tolerance);
    return fp;
}

std::set<ControllerId> match_timeouts(const TimeoutEstimate& estimate, const SignatureDatabase& db,
                                      Seconds tolerance)
{
    if (estimate.hard)
        return match_timeouts(TimeoutDefaults{estimate.idle, *estimate.hard}, db, tolerance);
    std::set<ControllerId> out;
    for (const auto& sig : db) {
        const auto& e = sig.timeouts.idle;
        bool ok = estimate.idle.is_infinite() || e.is_infinite()
                      ? estimate.idle.is_infinite() && e.is_infinite()
                      : std::abs(estimate.idle.seconds().count() - e.seconds().count()) <=
                            tolerance.count() + 1e-12;
        if (ok)
            out.insert(sig.id);
    }
    return out;
}

} // namespace ofp
