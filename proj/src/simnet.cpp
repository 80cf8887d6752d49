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

#include "ofprint/simnet.hpp"
#include "ofprint/packet_analysis.hpp"

#include <algorithm>
#include <ostream>

namespace ofp {

ControllerModel ControllerModel::from_signature(const ControllerSignature& sig)
{
    ControllerModel m;
    m.id = sig.id;
    m.processing_delay = sig.processing.t_p_adjusted;
    m.idle = sig.timeouts.idle;
    m.hard = sig.timeouts.hard;
    m.lldp = sig.lldp;
    m.arp_rebroadcast = sig.arp_rebroadcast;
    return m;
}

void ControllerModel::validate() const
{
    if (id.empty())
        throw Error(ErrorCode::InvalidConfig, "controller model needs an id");
    if (processing_delay.count() < 0 || processing_jitter.count() < 0)
        throw Error(ErrorCode::InvalidConfig, "processing delay and jitter must be >= 0");
    if (processing_jitter > processing_delay)
        throw Error(ErrorCode::InvalidConfig, "processing jitter must not exceed the delay");
    if (!(lldp.interval.count() > 0))
        throw Error(ErrorCode::InvalidConfig, "LLDP interval must be > 0");
}

void LinkModel::validate() const
{
    if (!(one_way_latency.count() > 0))
        throw Error(ErrorCode::InvalidConfig, "link latency must be > 0");
    if (jitter.count() < 0 || !(jitter < one_way_latency))
        throw Error(ErrorCode::InvalidConfig, "link jitter must be in [0, latency)");
    if (!(loss_rate >= 0.0 && loss_rate < 1.0))
        throw Error(ErrorCode::InvalidConfig, "link loss rate must be in [0, 1)");
}

const char* to_string(NoiseProfile p)
{
    switch (p) {
    case NoiseProfile::Default: return "default";
    case NoiseProfile::Noisy: return "noisy";
    case NoiseProfile::Minimal: return "minimal";
    }
    return "?";
}

std::optional<NoiseProfile> parse_noise_profile(std::string_view name)
{
    if (name == "default") return NoiseProfile::Default;
    if (name == "noisy") return NoiseProfile::Noisy;
    if (name == "minimal") return NoiseProfile::Minimal;
    return std::nullopt;
}

LinkModel link_for(NoiseProfile p)
{
    switch (p) {
    case NoiseProfile::Default: return {Millis{1.0}, Millis{0.2}, 0.0};
    case NoiseProfile::Noisy: return {Millis{2.0}, Millis{1.0}, 0.01};
    // 2 x 0.4135 ms = 0.827 ms, the hit RTT of the testbed the shipped raw
    // processing times were measured on.
    case NoiseProfile::Minimal: return {Millis{0.4135}, Millis{0.05}, 0.0};
    }
    return {};
}

void ScenarioConfig::validate() const
{
    controller.validate();
    link.validate();
    if (hosts.size() < 2)
        throw Error(ErrorCode::InvalidConfig, "scenario needs at least an attacker and a target host");
    std::set<Ipv4Address> ips;
    for (const auto& h : hosts)
        if (!ips.insert(h.ip).second)
            throw Error(ErrorCode::InvalidConfig, "duplicate host address " + h.ip.str());
    if (switch_macs.empty())
        throw Error(ErrorCode::InvalidConfig, "scenario needs at least one switch MAC");
    if (transit_hops < 0 || hop_latency.count() < 0)
        throw Error(ErrorCode::InvalidConfig, "transit hops and hop latency must be >= 0");
    if (!(probe_timeout.count() > 0))
        throw Error(ErrorCode::InvalidConfig, "probe timeout must be > 0");
}

ScenarioConfig make_scenario(const ControllerModel& model, NoiseProfile profile)
{
    ScenarioConfig cfg;
    cfg.name = model.id + "@" + to_string(profile);
    cfg.controller = model;
    cfg.link = link_for(profile);
    cfg.hosts = {
        {"attacker", Ipv4Address::parse("10.0.0.1"), MacAddress::parse("02:00:00:00:00:01")},
        {"target", Ipv4Address::parse("10.0.0.2"), MacAddress::parse("02:00:00:00:00:02")},
        {"observer", Ipv4Address::parse("10.0.0.3"), MacAddress::parse("02:00:00:00:00:03")},
    };
    cfg.switch_macs = {MacAddress::parse("00:11:22:33:44:55")};
    return cfg;
}

std::optional<ControllerId> resolve_controller_alias(std::string_view name,
                                                     const SignatureDatabase& db)
{
    if (find_signature(db, name))
        return ControllerId(name);
    static const std::map<std::string, std::string, std::less<>> aliases = {
        {"hydrogen", "opendaylight-hydrogen"},
        {"odl-hydrogen", "opendaylight-hydrogen"},
        {"odl-h", "opendaylight-hydrogen"},
        {"odl", "opendaylight-lithium-helium"},
        {"opendaylight", "opendaylight-lithium-helium"},
        {"odl-lithium-helium", "opendaylight-lithium-helium"},
        {"odl-l/h", "opendaylight-lithium-helium"},
        {"odl-lh", "opendaylight-lithium-helium"},
    };
    auto it = aliases.find(name);
    if (it != aliases.end() && find_signature(db, it->second))
        return it->second;
    return std::nullopt;
}

ScenarioConfig resolve_scenario(std::string_view name_or_path, const SignatureDatabase& db,
                                NoiseProfile profile)
{
    if (auto id = resolve_controller_alias(name_or_path, db))
        return make_scenario(ControllerModel::from_signature(*find_signature(db, *id)), profile);
    std::filesystem::path path{std::string(name_or_path)};
    if (std::filesystem::exists(path))
        return load_scenario(path, db);
    throw Error(ErrorCode::InvalidConfig, "unknown scenario '" + std::string(name_or_path) +
                                              "' (not a controller id or scenario file)");
}

const char* to_string(TraceKind k)
{
    switch (k) {
    case TraceKind::ProbeSent: return "probe-sent";
    case TraceKind::ProbeLost: return "probe-lost";
    case TraceKind::ProbeReply: return "probe-reply";
    case TraceKind::PacketIn: return "packet-in";
    case TraceKind::FlowInstall: return "flow-install";
    case TraceKind::FlowHit: return "flow-hit";
    case TraceKind::FlowExpire: return "flow-expire";
    case TraceKind::LldpEmit: return "lldp-emit";
    case TraceKind::CompanionEmit: return "companion-emit";
    case TraceKind::ArpBroadcast: return "arp-broadcast";
    case TraceKind::ArpRebroadcast: return "arp-rebroadcast";
    case TraceKind::ArpReply: return "arp-reply";
    }
    return "?";
}

void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace)
{
    for (const auto& ev : trace) {
        os << ev.at.count() << ' ' << to_string(ev.kind) << " seq=" << ev.sequence
           << " src=" << ev.key.src.str() << " dst=" << ev.key.dst.str();
        if (ev.kind == TraceKind::FlowHit) {
            os << " installed=" << ev.installed_at.count() << " idle_deadline="
               << (ev.idle_deadline ? std::to_string(ev.idle_deadline->count()) : "never")
               << " hard_deadline="
               << (ev.hard_deadline ? std::to_string(ev.hard_deadline->count()) : "never");
        }
        os << '\n';
    }
}

std::size_t audit_trace(const std::vector<TraceEvent>& trace)
{
    std::size_t bad = 0;
    for (const auto& ev : trace) {
        if (ev.kind != TraceKind::FlowHit)
            continue;
        if ((ev.idle_deadline && ev.at >= *ev.idle_deadline) ||
            (ev.hard_deadline && ev.at >= *ev.hard_deadline))
            ++bad;
    }
    return bad;
}

bool FlowEntry::expired_at(Timestamp t) const
{
    auto i = idle_deadline();
    auto h = hard_deadline();
    return (i && t >= *i) || (h && t >= *h);
}

// ---------------------------------------------------------------------------

namespace {

TraceEvent trace_event(Timestamp at, TraceKind kind, FlowKey key, std::uint64_t sequence)
{
    TraceEvent e;
    e.at = at;
    e.kind = kind;
    e.key = key;
    e.sequence = sequence;
    return e;
}

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Simnet::Simnet(ScenarioConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      link_rng_(splitmix(seed)),
      lldp_rng_(splitmix(seed ^ 0x6c6c6470ULL)),
      attacker_(*this)
{
    config_.validate();
}

std::unique_ptr<Simnet> run_scenario(const ScenarioConfig& config, std::uint64_t seed)
{
    return std::make_unique<Simnet>(config, seed);
}

double Simnet::uniform(std::mt19937_64& rng, double lo, double hi)
{
    // 53-bit mantissa draw; std distributions differ across libraries.
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

Timestamp Simnet::path_half()
{
    double half = config_.link.one_way_latency.count() / 2.0;
    double j = config_.link.jitter.count() / 2.0;
    double ms = half + (j > 0 ? uniform(link_rng_, -j, j) : 0.0);
    return to_timestamp(Millis{ms});
}

Timestamp Simnet::processing_delay()
{
    double base = config_.controller.processing_delay.count();
    double j = config_.controller.processing_jitter.count();
    double ms = base + (j > 0 ? uniform(link_rng_, -j, j) : 0.0);
    return to_timestamp(Millis{ms});
}

bool Simnet::lost()
{
    if (config_.link.loss_rate <= 0)
        return false;
    return uniform(link_rng_, 0.0, 1.0) < config_.link.loss_rate;
}

void Simnet::schedule(Timestamp at, std::function<void()> fn)
{
    queue_.push(Event{at, order_++, std::move(fn)});
}

bool Simnet::step(Timestamp limit)
{
    if (queue_.empty() || queue_.top().at > limit)
        return false;
    Event ev = queue_.top();
    queue_.pop();
    now_ = std::max(now_, ev.at);
    ++events_processed_;
    ev.fn();
    return true;
}

void Simnet::run_until(Timestamp t)
{
    while (step(t)) { }
    now_ = std::max(now_, t);
}

void Simnet::record(TraceEvent ev)
{
    if (config_.record_trace)
        trace_.push_back(std::move(ev));
}

const HostConfig* Simnet::host_by_ip(Ipv4Address ip) const
{
    for (const auto& h : config_.hosts)
        if (h.ip == ip)
            return &h;
    return nullptr;
}

FlowEntry* Simnet::lookup(const FlowKey& key)
{
    auto it = table_.find(key);
    if (it == table_.end())
        return nullptr;
    if (it->second.expired_at(now_)) {
        const auto& e = it->second;
        auto i = e.idle_deadline();
        auto h = e.hard_deadline();
        Timestamp at = i && h ? std::min(*i, *h) : (i ? *i : *h);
        record({at, TraceKind::FlowExpire, key, 0, e.installed_at, i, h});
        table_.erase(it);
        return nullptr;
    }
    return &it->second;
}

void Simnet::install(const FlowKey& key, Timestamp at)
{
    FlowEntry e{key, at, at, config_.controller.idle, config_.controller.hard};
    table_[key] = e;
    record({at, TraceKind::FlowInstall, key, 0, at, e.idle_deadline(), e.hard_deadline()});
}

void Simnet::switch_forward(const FlowKey& key, std::uint64_t sequence,
                            std::function<void(Timestamp)> deliver)
{
    if (FlowEntry* e = lookup(key)) {
        auto idle_dl = e->idle_deadline();
        auto hard_dl = e->hard_deadline();
        if ((idle_dl && now_ >= *idle_dl) || (hard_dl && now_ >= *hard_dl))
            ++audit_violations_;
        record({now_, TraceKind::FlowHit, key, sequence, e->installed_at, idle_dl, hard_dl});
        e->last_hit = now_;
        deliver(now_);
        return;
    }
    record(trace_event(now_, TraceKind::PacketIn, key, sequence));
    schedule(now_ + processing_delay(), [this, key, deliver = std::move(deliver)] {
        install(key, now_);
        FlowKey reverse{key.dst, key.src};
        if (!lookup(reverse))
            install(reverse, now_);
        deliver(now_);
    });
}

std::optional<Millis> Simnet::echo(Ipv4Address src, Ipv4Address dst, std::uint64_t sequence)
{
    const Timestamp sent = now_;
    const Timestamp deadline = sent + to_timestamp(config_.probe_timeout);
    const Timestamp transit =
        to_timestamp(Millis{config_.hop_latency.count() * config_.transit_hops});
    record(trace_event(sent, TraceKind::ProbeSent, {src, dst}, sequence));

    if (lost()) {
        record(trace_event(sent, TraceKind::ProbeLost, {src, dst}, sequence));
    } else {
        schedule(sent + path_half(), [this, src, dst, sequence, transit] {
            switch_forward({src, dst}, sequence, [this, src, dst, sequence, transit](Timestamp out) {
                schedule(out + path_half() + transit, [this, src, dst, sequence, transit] {
                    const HostConfig* host = host_by_ip(dst);
                    if (!host || dst == config_.hosts[0].ip)
                        return; // nobody answers
                    schedule(now_ + path_half() + transit, [this, src, dst, sequence] {
                        switch_forward({dst, src}, sequence, [this, src, dst, sequence](Timestamp back) {
                            if (lost()) {
                                record(trace_event(back, TraceKind::ProbeLost, {dst, src}, sequence));
                                return;
                            }
                            schedule(back + path_half(), [this, src, dst, sequence] {
                                replies_[sequence] = now_;
                                record(trace_event(now_, TraceKind::ProbeReply, {dst, src}, sequence));
                            });
                        });
                    });
                });
            });
        });
    }

    while (!replies_.count(sequence)) {
        if (!step(deadline))
            break;
    }
    auto it = replies_.find(sequence);
    if (it == replies_.end()) {
        now_ = std::max(now_, deadline);
        return std::nullopt;
    }
    Timestamp got = it->second;
    replies_.erase(it);
    now_ = std::max(now_, got);
    return std::chrono::duration_cast<Millis>(got - sent);
}

LldpObservation Simnet::lldp_template() const
{
    const auto& p = config_.controller.lldp;
    const MacAddress& sw = config_.switch_macs.front();
    auto fill = [&](const std::string& pattern) {
        std::string out = pattern;
        auto at = out.find("[MAC]");
        if (at != std::string::npos)
            out.replace(at, 5, sw.str());
        return out;
    };

    LldpObservation obs;
    obs.source = sw;
    obs.chassis_id = {4}; // subtype: MAC address
    obs.chassis_id.insert(obs.chassis_id.end(), sw.bytes.begin(), sw.bytes.end());
    obs.port_id = {2, 0x00, 0x01}; // subtype: port component, port 1
    obs.ttl = 120;
    if (p.system_name_pattern)
        obs.system_name = fill(*p.system_name_pattern);
    if (p.system_description_pattern)
        obs.system_description = fill(*p.system_description_pattern);
    if (p.unknown_tlv_count)
        obs.unknown_tlv_count = *p.unknown_tlv_count;
    else if (p.companion_ethertype)
        obs.unknown_tlv_count = 2; // dpid and direction TLVs
    return obs;
}

void Simnet::extend_lldp_schedule(Timestamp until)
{
    const auto& p = config_.controller.lldp;
    const double interval = p.interval.count();
    if (lldp_schedule_.empty())
        lldp_schedule_.push_back(to_timestamp(Seconds{uniform(lldp_rng_, 0.0, interval)}));
    while (lldp_schedule_.back() < until) {
        double gap = interval;
        if (p.interval_variable)
            gap *= 1.0 + uniform(lldp_rng_, -0.1, 0.1);
        lldp_schedule_.push_back(lldp_schedule_.back() + to_timestamp(Seconds{gap}));
    }
}

std::vector<CapturedFrame> Simnet::lldp_frames(Timestamp from, Timestamp to)
{
    std::vector<CapturedFrame> out;
    if (to <= from)
        return out;
    const Timestamp hop = to_timestamp(Millis{config_.link.one_way_latency.count() / 2.0});
    const Timestamp companion_gap = to_timestamp(Millis{0.5});
    extend_lldp_schedule(to);

    LldpObservation tmpl = lldp_template();
    const auto& companion = config_.controller.lldp.companion_ethertype;
    for (Timestamp emitted : lldp_schedule_) {
        Timestamp arrival = emitted + hop;
        if (arrival >= to)
            break;
        if (arrival >= from) {
            tmpl.received_at = arrival;
            out.push_back(serialize_lldp(tmpl));
        }
        if (companion) {
            Timestamp c_at = arrival + companion_gap;
            if (c_at >= from && c_at < to) {
                auto lldp = serialize_lldp(tmpl);
                std::vector<std::uint8_t> payload(lldp.raw.begin() + kEthernetHeaderLen,
                                                  lldp.raw.end());
                auto raw = build_ethernet({MacAddress::broadcast(), tmpl.source, *companion},
                                          payload);
                out.push_back(CapturedFrame{std::move(raw), c_at, *companion});
            }
        }
    }
    return out;
}

std::vector<CapturedFrame> Simnet::segment_frames(Timestamp from, Timestamp to) const
{
    std::vector<CapturedFrame> out;
    for (const auto& f : segment_)
        if (f.received_at >= from && f.received_at < to)
            out.push_back(f);
    return out;
}

ArpOutcome Simnet::send_arp(const ArpPacket& request, const MacAddress& eth_src, Seconds window)
{
    const Timestamp start = now_;
    const Timestamp end = start + to_timestamp(window);
    auto shared = std::make_shared<ArpOutcome>();
    const bool from_attacker = eth_src == config_.hosts[0].mac;
    const auto original = build_arp_frame(eth_src, MacAddress::broadcast(), request);

    auto to_requester = [this, shared, from_attacker](std::vector<std::uint8_t> raw) {
        CapturedFrame f{std::move(raw), now_, kEthertypeArp};
        shared->seen_by_requester.push_back(f);
        if (from_attacker)
            segment_.push_back(std::move(f));
    };

    record(trace_event(start, TraceKind::ArpBroadcast, {request.sender_ip, request.target_ip}, 0));
    schedule(start + path_half(), [=, this] {
        // Flood to every other port.
        schedule(now_ + path_half(), [=, this] {
            shared->seen_by_observer.push_back({original, now_, kEthertypeArp});
        });

        const HostConfig* owner = host_by_ip(request.target_ip);
        if (owner) {
            ArpPacket reply{2, owner->mac, owner->ip, request.sender_mac, request.sender_ip};
            auto raw = build_arp_frame(owner->mac, eth_src, reply);
            schedule(now_ + path_half() + path_half() + path_half(), [=, this] {
                record(trace_event(now_, TraceKind::ArpReply, {owner->ip, request.sender_ip}, 0));
                to_requester(raw);
            });
            return;
        }

        shared->controller_involved = true;
        record(trace_event(now_, TraceKind::PacketIn, {request.sender_ip, request.target_ip}, 0));
        if (!config_.controller.arp_rebroadcast)
            return;
        schedule(now_ + processing_delay(), [=, this] {
            record(trace_event(now_, TraceKind::ArpRebroadcast, {request.sender_ip, request.target_ip}, 0));
            auto dup = build_arp_frame(config_.switch_macs.front(), MacAddress::broadcast(),
                                       request);
            schedule(now_ + path_half(), [=, this] {
                shared->seen_by_observer.push_back({dup, now_, kEthertypeArp});
            });
            schedule(now_ + path_half(), [=, this] { to_requester(dup); });
        });
    });

    run_until(end);

    ArpOutcome out;
    auto in_window = [&](const CapturedFrame& f) { return f.received_at < end; };
    std::copy_if(shared->seen_by_observer.begin(), shared->seen_by_observer.end(),
                 std::back_inserter(out.seen_by_observer), in_window);
    std::copy_if(shared->seen_by_requester.begin(), shared->seen_by_requester.end(),
                 std::back_inserter(out.seen_by_requester), in_window);
    out.controller_involved = shared->controller_involved;
    return out;
}

// ---------------------------------------------------------------------------

RttSample SimTransport::send_probe(const ProbeTarget& target)
{
    if (down_)
        throw Error(ErrorCode::TransportDown, "simulated transport is down");
    RttSample s;
    s.sequence = next_sequence_++;
    s.sent_at = net_.now();
    Ipv4Address src = target.spoof_source ? *target.spoof_source : local_address();
    s.rtt = net_.echo(src, target.destination, s.sequence);
    return s;
}

std::vector<CapturedFrame> SimTransport::capture_frames(std::span<const std::uint16_t> ethertypes,
                                                        Seconds window)
{
    if (down_)
        throw Error(ErrorCode::TransportDown, "simulated transport is down");
    const Timestamp start = net_.now();
    const Timestamp end = start + to_timestamp(window);
    if (end <= start)
        return {};
    net_.run_until(end);

    auto wanted = [&](std::uint16_t et) {
        return std::find(ethertypes.begin(), ethertypes.end(), et) != ethertypes.end();
    };
    std::vector<CapturedFrame> out;
    for (auto& f : net_.lldp_frames(start, end))
        if (wanted(f.ethertype))
            out.push_back(std::move(f));
    for (auto& f : net_.segment_frames(start, end))
        if (wanted(f.ethertype))
            out.push_back(std::move(f));
    std::stable_sort(out.begin(), out.end(), [](const CapturedFrame& a, const CapturedFrame& b) {
        return a.received_at < b.received_at;
    });
    return out;
}

std::vector<CapturedFrame> SimTransport::send_arp_probe(Ipv4Address unknown_ip, Seconds window)
{
    if (down_)
        throw Error(ErrorCode::TransportDown, "simulated transport is down");
    if (window.count() <= 0)
        return {};
    ArpPacket req{1, local_mac(), local_address(), MacAddress{}, unknown_ip};
    return net_.send_arp(req, local_mac(), window).seen_by_requester;
}

Timestamp SimTransport::now() const
{
    return net_.now();
}

void SimTransport::sleep_until(Timestamp t)
{
    net_.run_until(t);
}

Ipv4Address SimTransport::local_address() const
{
    return net_.config().hosts.at(0).ip;
}

MacAddress SimTransport::local_mac() const
{
    return net_.config().hosts.at(0).mac;
}

} // namespace ofp
