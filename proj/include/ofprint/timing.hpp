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
#include "ofprint/transport.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ofp {

struct RttStats {
    std::vector<RttSample> samples;
    Millis rtt_avg{0};
    Millis rtt_std{0};
    int n = 0; // samples requested

    std::size_t received() const;
};

// Summarizes `samples` (lost ones included). Throws
// Error{InsufficientSamples} when fewer than max(3, 80% of n) arrived.
RttStats summarize_rtt(std::vector<RttSample> samples, int n);

struct ProbeSchedule {
    int n = 100;
    int m = 20;
    Seconds wait_initial{0};
    Seconds step{0.005};
    Seconds wait_cap{360};
    // Spacing of table-miss probes; defaults to the inferred idle timeout
    // plus one second.
    std::optional<Seconds> period;
    // Keep-alive wait of the hard timeout search; defaults to idle/2, or to
    // 5 s when the idle timeout is infinite.
    std::optional<Seconds> keepalive;
    Seconds hard_cap{120};
    Seconds resolution{0.001};
    bool refine = true;
    int retries = 3;     // extra attempts for a lost probe
    int flip_budget = 5; // consecutive unconfirmed expiries tolerated

    // Throws Error{InvalidArgument}.
    void validate() const;
};

struct TimeoutEstimate {
    Timeout idle = Timeout::infinite();
    std::optional<Timeout> hard; // unset until the hard search ran
    int iterations = 0;
    Seconds resolution{0};
};

/// The "T_ping ~ RTT_avg" test: present iff
/// t_ping <= rtt_avg + max(k * rtt_std, floor).
struct DecisionRule {
    double k = 4.0;
    Millis floor{0.5};
};

bool entry_present(Millis t_ping, const RttStats& baseline, const DecisionRule& rule = {});

/// One JSON object per probe: phase, sequence, wait, rtt and decision.
class MeasurementLog {
public:
    explicit MeasurementLog(std::ostream& os) : os_(os) { }
    void record(std::string_view phase, const RttSample& s, std::optional<Seconds> wait,
                std::string_view decision);

private:
    std::ostream& os_;
};

/// State shared by the timing algorithms of one scan session. Probes are
/// sent from `transport` to `target`; "fresh" flows claim unused source
/// addresses from 198.18.0.0/15 so their first probe always misses.
struct TimingContext {
    ProbeTransport& transport;
    ProbeTarget target;
    ProbeSchedule schedule;
    DecisionRule rule;
    MeasurementLog* log = nullptr;

    // Send time of the last probe on the target flow, shifted by the
    // controller delay when it was a miss (that is when the entry's clock
    // started).
    Timestamp anchor{0};
    std::uint32_t fresh_flows = 0;

    TimingContext(ProbeTransport& t, ProbeTarget tgt, ProbeSchedule s = {})
        : transport(t), target(tgt), schedule(s) { }
};

RttStats measure_baseline(TimingContext& ctx);

TimeoutEstimate infer_idle_timeout(TimingContext& ctx, const RttStats& baseline);

// Throws Error{InvalidArgument} when a finite idle is <= 2 * step or the
// keep-alive wait is not below it.
Timeout infer_hard_timeout(TimingContext& ctx, const RttStats& baseline,
                           const TimeoutEstimate& idle);

// Throws Error{PeriodTooSmall} when a finite idle is >= the period.
ProcessingTimeRecord build_processing_time_record(TimingContext& ctx, const RttStats& baseline,
                                                  const Timeout& idle);

struct ProcessingFingerprint {
    Millis rtt_prime{0}; // mean miss RTT
    Millis adjusted{0};  // rtt_prime - rtt_avg, clamped at 0
    std::vector<ProcessingMatch> matches;
};

inline constexpr Millis kDefaultProcessingTolerance{1.0};
inline constexpr Seconds kDefaultTimeoutTolerance{1.0};

ProcessingFingerprint fingerprint_by_processing_time(TimingContext& ctx, const RttStats& baseline,
                                                     const Timeout& idle,
                                                     const SignatureDatabase& db,
                                                     Millis tolerance = kDefaultProcessingTolerance);

// An estimate without a hard timeout is matched on idle alone.
std::set<ControllerId> match_timeouts(const TimeoutEstimate& estimate, const SignatureDatabase& db,
                                      Seconds tolerance = kDefaultTimeoutTolerance);

} // namespace ofp
