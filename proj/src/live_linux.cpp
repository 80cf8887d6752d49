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

// Linux backend: a promiscuous AF_PACKET socket for everything we observe,
// a raw IPv4 socket (IP_HDRINCL, so sources can be spoofed) for echo
// requests. Needs CAP_NET_RAW.

#include "ofprint/live.hpp"
#include "ofprint/frames.hpp"
#include "ofprint/signatures.hpp"

#include <arpa/inet.h>
#include <linux/if_packet.h>
#include <net/ethernet.h>
#include <net/if.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/ioctl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

namespace ofp {

namespace {

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) { }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd()
    {
        if (fd_ >= 0)
            ::close(fd_);
    }
    int get() const { return fd_; }

private:
    int fd_;
};

[[noreturn]] void unsupported(const std::string& what)
{
    throw Error(ErrorCode::CaptureUnsupported, what + ": " + std::strerror(errno));
}

std::uint16_t checksum(const std::uint8_t* p, std::size_t len)
{
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i + 1 < len; i += 2)
        sum += static_cast<std::uint32_t>(p[i] << 8 | p[i + 1]);
    if (len & 1)
        sum += static_cast<std::uint32_t>(p[len - 1] << 8);
    while (sum >> 16)
        sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum);
}

void put16(std::uint8_t* p, std::uint16_t v)
{
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v);
}

class LiveTransport final : public ProbeTransport {
public:
    explicit LiveTransport(const std::string& iface)
        : packet_(::socket(AF_PACKET, SOCK_RAW, htons(ETH_P_ALL))),
          raw_(::socket(AF_INET, SOCK_RAW, IPPROTO_RAW)),
          epoch_(std::chrono::steady_clock::now()),
          ident_(static_cast<std::uint16_t>(::getpid()))
    {
        if (packet_.get() < 0)
            unsupported("cannot open packet socket");
        if (raw_.get() < 0)
            unsupported("cannot open raw IPv4 socket");
        if (iface.size() >= IFNAMSIZ)
            throw Error(ErrorCode::InvalidArgument, "interface name too long");

        ifreq ifr{};
        std::strncpy(ifr.ifr_name, iface.c_str(), IFNAMSIZ - 1);
        if (::ioctl(packet_.get(), SIOCGIFINDEX, &ifr) < 0)
            unsupported("unknown interface '" + iface + "'");
        ifindex_ = ifr.ifr_ifindex;
        if (::ioctl(packet_.get(), SIOCGIFHWADDR, &ifr) < 0)
            unsupported("cannot read MAC of '" + iface + "'");
        std::memcpy(mac_.bytes.data(), ifr.ifr_hwaddr.sa_data, 6);
        ifr.ifr_addr.sa_family = AF_INET;
        if (::ioctl(raw_.get(), SIOCGIFADDR, &ifr) < 0)
            unsupported("cannot read IPv4 address of '" + iface + "'");
        ip_ = Ipv4Address{ntohl(reinterpret_cast<sockaddr_in*>(&ifr.ifr_addr)->sin_addr.s_addr)};

        sockaddr_ll sll{};
        sll.sll_family = AF_PACKET;
        sll.sll_protocol = htons(ETH_P_ALL);
        sll.sll_ifindex = ifindex_;
        if (::bind(packet_.get(), reinterpret_cast<sockaddr*>(&sll), sizeof sll) < 0)
            unsupported("cannot bind packet socket");
        packet_mreq mr{};
        mr.mr_ifindex = ifindex_;
        mr.mr_type = PACKET_MR_PROMISC;
        if (::setsockopt(packet_.get(), SOL_PACKET, PACKET_ADD_MEMBERSHIP, &mr, sizeof mr) < 0)
            unsupported("cannot enable promiscuous mode");
        int on = 1;
        if (::setsockopt(raw_.get(), IPPROTO_IP, IP_HDRINCL, &on, sizeof on) < 0)
            unsupported("cannot set IP_HDRINCL");
        ::setsockopt(raw_.get(), SOL_SOCKET, SO_BINDTODEVICE, iface.c_str(),
                     static_cast<socklen_t>(iface.size()));
    }

    RttSample send_probe(const ProbeTarget& target) override
    {
        RttSample s;
        s.sequence = ++sequence_;
        const Ipv4Address src = target.spoof_source ? *target.spoof_source : ip_;

        std::vector<std::uint8_t> pkt(20 + 8 + kProbePayloadBytes, 0);
        pkt[0] = 0x45;
        put16(&pkt[2], static_cast<std::uint16_t>(pkt.size()));
        put16(&pkt[4], static_cast<std::uint16_t>(s.sequence));
        pkt[8] = 64;
        pkt[9] = IPPROTO_ICMP;
        auto so = src.octets();
        auto dso = target.destination.octets();
        std::copy(so.begin(), so.end(), pkt.begin() + 12);
        std::copy(dso.begin(), dso.end(), pkt.begin() + 16);
        put16(&pkt[10], checksum(pkt.data(), 20));
        std::uint8_t* icmp = &pkt[20];
        icmp[0] = 8; // echo request
        put16(&icmp[4], ident_);
        put16(&icmp[6], static_cast<std::uint16_t>(s.sequence));
        for (std::size_t i = 0; i < kProbePayloadBytes; ++i)
            icmp[8 + i] = static_cast<std::uint8_t>(i);
        put16(&icmp[2], checksum(icmp, 8 + kProbePayloadBytes));

        sockaddr_in to{};
        to.sin_family = AF_INET;
        to.sin_addr.s_addr = htonl(target.destination.value);
        s.sent_at = now();
        if (::sendto(raw_.get(), pkt.data(), pkt.size(), 0, reinterpret_cast<sockaddr*>(&to),
                     sizeof to) < 0)
            throw Error(ErrorCode::TransportDown, std::string("sendto: ") + std::strerror(errno));

        const Timestamp deadline = s.sent_at + to_timestamp(kDefaultProbeTimeout);
        std::vector<std::uint8_t> buf;
        while (receive(buf, deadline)) {
            if (buf.size() < 14 + 20 + 8 || buf[12] != 0x08 || buf[13] != 0x00)
                continue;
            const std::uint8_t* ip = &buf[14];
            std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
            if (ip[9] != IPPROTO_ICMP || buf.size() < 14 + ihl + 8)
                continue;
            const std::uint8_t* ic = ip + ihl;
            if (ic[0] != 0 || Ipv4Address::from_octets(ip + 12) != target.destination ||
                Ipv4Address::from_octets(ip + 16) != src)
                continue;
            if (std::uint32_t(ic[4] << 8 | ic[5]) != ident_ ||
                std::uint32_t(ic[6] << 8 | ic[7]) != (s.sequence & 0xffff))
                continue;
            s.rtt = std::chrono::duration_cast<Millis>(now() - s.sent_at);
            break;
        }
        return s;
    }

    std::vector<CapturedFrame> capture_frames(std::span<const std::uint16_t> ethertypes,
                                              Seconds window) override
    {
        std::vector<CapturedFrame> out;
        const Timestamp deadline = now() + to_timestamp(window);
        std::vector<std::uint8_t> buf;
        while (receive(buf, deadline)) {
            if (buf.size() < kEthernetHeaderLen)
                continue;
            std::uint16_t et = static_cast<std::uint16_t>(buf[12] << 8 | buf[13]);
            if (std::find(ethertypes.begin(), ethertypes.end(), et) != ethertypes.end())
                out.push_back(CapturedFrame{buf, now(), et});
        }
        return out;
    }

    std::vector<CapturedFrame> send_arp_probe(Ipv4Address unknown_ip, Seconds window) override
    {
        if (window.count() <= 0)
            return {};
        ArpPacket req{1, mac_, ip_, MacAddress{}, unknown_ip};
        auto frame = build_arp_frame(mac_, MacAddress::broadcast(), req);
        sockaddr_ll to{};
        to.sll_family = AF_PACKET;
        to.sll_ifindex = ifindex_;
        to.sll_halen = 6;
        std::fill(std::begin(to.sll_addr), std::begin(to.sll_addr) + 6, 0xff);
        if (::sendto(packet_.get(), frame.data(), frame.size(), 0,
                     reinterpret_cast<sockaddr*>(&to), sizeof to) < 0)
            throw Error(ErrorCode::TransportDown, std::string("sendto: ") + std::strerror(errno));
        const std::uint16_t arp[] = {kEthertypeArp};
        auto frames = capture_frames(arp, window);
        std::erase_if(frames, [&](const CapturedFrame& f) {
            return parse_ethernet(f.raw).src == mac_;
        });
        return frames;
    }

    Timestamp now() const override
    {
        return std::chrono::duration_cast<Timestamp>(std::chrono::steady_clock::now() - epoch_);
    }

    void sleep_until(Timestamp t) override
    {
        std::this_thread::sleep_until(epoch_ + t);
    }

    Ipv4Address local_address() const override { return ip_; }
    MacAddress local_mac() const override { return mac_; }

private:
    // Next frame before `deadline`; false on timeout.
    bool receive(std::vector<std::uint8_t>& buf, Timestamp deadline)
    {
        for (;;) {
            Timestamp left = deadline - now();
            if (left <= Timestamp{0})
                return false;
            pollfd pfd{packet_.get(), POLLIN, 0};
            int ms = static_cast<int>(
                std::max<std::int64_t>(1, std::chrono::duration_cast<std::chrono::milliseconds>(left).count()));
            int r = ::poll(&pfd, 1, ms);
            if (r < 0) {
                if (errno == EINTR)
                    continue;
                throw Error(ErrorCode::TransportDown, std::string("poll: ") + std::strerror(errno));
            }
            if (r == 0)
                continue;
            buf.resize(65536);
            ssize_t n = ::recv(packet_.get(), buf.data(), buf.size(), 0);
            if (n < 0) {
                if (errno == EINTR || errno == EAGAIN)
                    continue;
                throw Error(ErrorCode::TransportDown, std::string("recv: ") + std::strerror(errno));
            }
            buf.resize(static_cast<std::size_t>(n));
            return true;
        }
    }

    Fd packet_;
    Fd raw_;
    std::chrono::steady_clock::time_point epoch_;
    std::uint16_t ident_;
    std::uint32_t sequence_ = 0;
    int ifindex_ = 0;
    MacAddress mac_;
    Ipv4Address ip_;
};

} // namespace

std::unique_ptr<ProbeTransport> open_live_transport(const std::string& iface)
{
    return std::make_unique<LiveTransport>(iface);
}

bool live_backend_available()
{
    return true;
}

} // namespace ofp
