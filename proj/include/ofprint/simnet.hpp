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
#include "ofprint/packet_analysis.hpp"
#include "ofprint/signatures.hpp"
#include "ofprint/transport.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace ofp {

/// Reactive controller behind the simulated switch. The LLDP frames it
/// emits are synthesized from `lldp`, so every profile round-trips through
/// parse_lldp by construction.
struct ControllerModel {
    std::string id;
    Millis processing_delay{0};
    Millis processing_jitter{0}; // uniform +/- bound
    Timeout idle = Timeout::infinite();
    Timeout hard = Timeout::infinite();
    LldpProfile lldp;
    bool arp_rebroadcast = false;

    // Ground truth replaying a database entry: the adjusted processing time
    // is the controller's own delay.
    static ControllerModel from_signature(const ControllerSignature& sig);

    void validate() const;
};

/// One-way path between the attacker and the probed host, through the
/// switch. Jitter is uniform in [-jitter, +jitter] per traversal.
struct LinkModel {
    Millis one_way_latency{1.0};
    Millis jitter{0.2};
    double loss_rate = 0.0;

    void validate() const;
};

enum class NoiseProfile {
    Default, // 1 ms one way, +/-0.2 ms, no loss
    Noisy,   // 2 ms one way, +/-1 ms, 1% loss
    Minimal, // 0.4135 ms one way, +/-0.05 ms, no loss
};

const char* to_string(NoiseProfile p);
std::optional<NoiseProfile> parse_noise_profile(std::string_view name);
LinkModel link_for(NoiseProfile p);

struct HostConfig {
    std::string name;
    Ipv4Address ip;
    MacAddress mac;
};

struct ScenarioConfig {
    std::string name;
    ControllerModel controller;
    LinkModel link;
    // hosts[0] is the attacker, hosts[1] the default probe destination;
    // further hosts are passive observers.
    std::vector<HostConfig> hosts;
    std::vector<MacAddress> switch_macs;
    int transit_hops = 0;
    Millis hop_latency{0.05};
    std::optional<Ipv4Address> probe_destination;
    Seconds probe_timeout = kDefaultProbeTimeout;
    bool record_trace = false;

    Ipv4Address destination() const
    { return probe_destination ? *probe_destination : hosts.at(1).ip; }

    void validate() const;
};

ScenarioConfig make_scenario(const ControllerModel& model, NoiseProfile profile);

/// Resolves `--sim` style names: a controller id (or alias such as
/// "odl-hydrogen") from `db`, or a path to a scenario file.
ScenarioConfig resolve_scenario(std::string_view name_or_path, const SignatureDatabase& db,
                                NoiseProfile profile);

ScenarioConfig parse_scenario(std::string_view text, const SignatureDatabase& db);
ScenarioConfig load_scenario(const std::filesystem::path& path, const SignatureDatabase& db);

std::optional<ControllerId> resolve_controller_alias(std::string_view name,
                                                     const SignatureDatabase& db);

enum class TraceKind {
    ProbeSent,
    ProbeLost,
    ProbeReply,
    PacketIn,
    FlowInstall,
    FlowHit,
    FlowExpire,
    LldpEmit,
    CompanionEmit,
    ArpBroadcast,
    ArpRebroadcast,
    ArpReply,
};

const char* to_string(TraceKind k);

struct FlowKey {
    Ipv4Address src;
    Ipv4Address dst;

    auto operator<=>(const FlowKey&) const = default;
};

struct TraceEvent {
    Timestamp at{0};
    TraceKind kind = TraceKind::ProbeSent;
    FlowKey key;
    std::uint64_t sequence = 0;
    // Entry state a FlowHit was forwarded under (deadlines before refresh).
    Timestamp installed_at{0};
    std::optional<Timestamp> idle_deadline;
    std::optional<Timestamp> hard_deadline;

    bool operator==(const TraceEvent&) const = default;
};

void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace);

// Number of FlowHit events forwarded at or after one of their deadlines.
std::size_t audit_trace(const std::vector<TraceEvent>& trace);

struct FlowEntry {
    FlowKey key;
    Timestamp installed_at{0};
    Timestamp last_hit{0};
    Timeout idle;
    Timeout hard;

    std::optional<Timestamp> idle_deadline() const { return idle.deadline_after(last_hit); }
    std::optional<Timestamp> hard_deadline() const { return hard.deadline_after(installed_at); }
    // Expired at `t` when t has reached either deadline.
    bool expired_at(Timestamp t) const;
};

struct ArpOutcome {
    std::vector<CapturedFrame> seen_by_observer;
    std::vector<CapturedFrame> seen_by_requester;
    bool controller_involved = false;
};

class Simnet;

/// The attacker's handle onto a Simnet.
class SimTransport final : public ProbeTransport {
public:
    explicit SimTransport(Simnet& net) : net_(net) { }

    RttSample send_probe(const ProbeTarget& target) override;
    std::vector<CapturedFrame> capture_frames(std::span<const std::uint16_t> ethertypes,
                                              Seconds window) override;
    std::vector<CapturedFrame> send_arp_probe(Ipv4Address unknown_ip, Seconds window) override;
    Timestamp now() const override;
    void sleep_until(Timestamp t) override;
    Ipv4Address local_address() const override;
    MacAddress local_mac() const override;

    // Simulates a transport failure for tests.
    void set_down(bool down) { down_ = down; }

private:
    Simnet& net_;
    bool down_ = false;
    std::uint32_t next_sequence_ = 1;
};

/**
 * Deterministic discrete-event model of one reactive OpenFlow switch, its
 * controller and the hosts on it. Virtual time only; every random draw
 * comes from the seed.
 */
class Simnet {
public:
    Simnet(ScenarioConfig config, std::uint64_t seed);
    Simnet(const Simnet&) = delete;
    Simnet& operator=(const Simnet&) = delete;

    const ScenarioConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    Timestamp now() const { return now_; }

    void run_until(Timestamp t);

    SimTransport& attacker() { return attacker_; }

    // Echo from the attacker (or a spoofed source) to `dst`. Returns the
    // RTT or nullopt on loss/timeout; advances the clock accordingly.
    std::optional<Millis> echo(Ipv4Address src, Ipv4Address dst, std::uint64_t sequence);

    // LLDP (and companion) frames delivered to the attacker's port whose
    // arrival lies in [from, to).
    std::vector<CapturedFrame> lldp_frames(Timestamp from, Timestamp to);

    // Frames other than LLDP delivered to the attacker's port in [from, to).
    std::vector<CapturedFrame> segment_frames(Timestamp from, Timestamp to) const;

    // ARP request from the attacker; runs the clock to now + window.
    ArpOutcome send_arp(const ArpPacket& request, const MacAddress& eth_src, Seconds window);

    const std::map<FlowKey, FlowEntry>& flow_table() const { return table_; }
    const std::vector<TraceEvent>& trace() const { return trace_; }
    std::size_t audit_violations() const { return audit_violations_; }
    std::uint64_t events_processed() const { return events_processed_; }

private:
    struct Event {
        Timestamp at;
        std::uint64_t order;
        std::function<void()> fn;
        bool operator>(const Event& o) const
        { return at != o.at ? at > o.at : order > o.order; }
    };

    void schedule(Timestamp at, std::function<void()> fn);
    bool step(Timestamp limit);
    double uniform(std::mt19937_64& rng, double lo, double hi);
    Timestamp one_way_half(double jitter_sign_draw) const;
    Timestamp path_half();
    Timestamp processing_delay();
    bool lost();

    // Switch pipeline: forward along (src,dst), invoking the controller on
    // a miss, then `deliver` at the time the packet leaves the switch.
    void switch_forward(const FlowKey& key, std::uint64_t sequence,
                        std::function<void(Timestamp)> deliver);
    FlowEntry* lookup(const FlowKey& key);
    void install(const FlowKey& key, Timestamp at);
    const HostConfig* host_by_ip(Ipv4Address ip) const;
    void record(TraceEvent ev);
    void extend_lldp_schedule(Timestamp until);
    LldpObservation lldp_template() const;

    ScenarioConfig config_;
    std::uint64_t seed_;
    Timestamp now_{0};
    std::uint64_t order_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::mt19937_64 link_rng_;
    std::mt19937_64 lldp_rng_;
    std::map<FlowKey, FlowEntry> table_;
    std::vector<TraceEvent> trace_;
    std::size_t audit_violations_ = 0;
    std::uint64_t events_processed_ = 0;

    std::vector<Timestamp> lldp_schedule_;
    std::vector<CapturedFrame> segment_; // non-LLDP frames to the attacker port

    std::map<std::uint64_t, Timestamp> replies_;
    SimTransport attacker_;
};

/// Builds a simulation for `config` and `seed`. Throws Error{InvalidConfig}.
std::unique_ptr<Simnet> run_scenario(const ScenarioConfig& config, std::uint64_t seed);

} // namespace ofp
