#include "flowname/model.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <cctype>

namespace flowname {

std::string_view rtypeName(RType t) {
    switch (t) {
        case RType::A: return "A";
        case RType::AAAA: return "AAAA";
        case RType::CNAME: return "CNAME";
        case RType::Other: return "OTHER";
    }
    return "OTHER";
}

std::optional<RType> rtypeFromName(std::string_view name) {
    if (name == "A") return RType::A;
    if (name == "AAAA") return RType::AAAA;
    if (name == "CNAME") return RType::CNAME;
    if (name == "OTHER") return RType::Other;
    return std::nullopt;
}

std::string_view variantName(Variant v) {
    switch (v) {
        case Variant::Main: return "main";
        case Variant::NoSplit: return "no-split";
        case Variant::NoClearUp: return "no-clear-up";
        case Variant::NoRotation: return "no-rotation";
        case Variant::NoLongMaps: return "no-long-maps";
        case Variant::ExactTtl: return "exact-ttl";
    }
    return "main";
}

std::optional<Variant> variantFromName(std::string_view name) {
    if (name == "main") return Variant::Main;
    if (name == "no-split") return Variant::NoSplit;
    if (name == "no-clear-up") return Variant::NoClearUp;
    if (name == "no-rotation") return Variant::NoRotation;
    if (name == "no-long-maps") return Variant::NoLongMaps;
    if (name == "exact-ttl") return Variant::ExactTtl;
    return std::nullopt;
}

EngineConfig EngineConfig::normalized() const {
    EngineConfig c = *this;
    if (c.variant == Variant::NoSplit) c.numSplit = 1;
    return c;
}

std::optional<std::string> EngineConfig::validate() const {
    if (aClearUpInterval <= 0) return "a-interval must be positive";
    if (cClearUpInterval <= 0) return "c-interval must be positive";
    if (longClearUpInterval && *longClearUpInterval <= 0) return "long-interval must be positive";
    if (numSplit < 1) return "num-split must be >= 1";
    if (variant == Variant::NoSplit && numSplit != 1) return "variant no-split requires num-split = 1";
    if (chainLimit < 1) return "chain-limit must be >= 1";
    if (queueCapacity < 1) return "queue-cap must be >= 1";
    if (fillWorkers < 1 || lookupWorkers < 1 || writeWorkers < 1) return "worker counts must be >= 1";
    if (rollInterval <= 0) return "roll-interval must be positive";
    return std::nullopt;
}

std::optional<std::string> validate(const DnsRecord& rec) {
    if (rec.ts < 0) return "ts must be non-negative";
    if (rec.ttl < 0) return "ttl must be non-negative";
    if (rec.qname.empty()) return "qname must be non-empty";
    if (rec.answer.empty()) return "answer must be non-empty";
    if (rec.rtype == RType::A && !isIpv4(rec.answer)) return "A answer is not an IPv4 address";
    if (rec.rtype == RType::AAAA && !isIpv6(rec.answer)) return "AAAA answer is not an IPv6 address";
    return std::nullopt;
}

std::optional<std::string> validate(const FlowRecord& rec) {
    if (rec.ts < 0) return "ts must be non-negative";
    if (!ipFamilyOf(rec.srcIp)) return "srcIP is not an IP address";
    if (!ipFamilyOf(rec.dstIp)) return "dstIP is not an IP address";
    if (rec.proto < 0 || rec.proto > 255) return "proto out of range";
    if (rec.srcPort < 0 || rec.srcPort > 65535) return "srcPort out of range";
    if (rec.dstPort < 0 || rec.dstPort > 65535) return "dstPort out of range";
    if (rec.packets < 1) return "packets must be >= 1";
    if (rec.bytes < 1) return "bytes must be >= 1";
    return std::nullopt;
}

std::optional<std::string> validate(const CorrelatedRecord& rec, int chainLimit) {
    if (rec.chain.empty() != !rec.result.has_value()) return "chain empty iff result null";
    if (rec.result && *rec.result != rec.chain.back()) return "result must equal last chain element";
    if (rec.chain.size() > static_cast<std::size_t>(1 + chainLimit)) return "chain exceeds 1 + chainLimit";
    return std::nullopt;
}

DnsRecord makeDnsRecord(std::int64_t ts, RType rtype, std::string qname,
                        std::int64_t ttl, std::string answer) {
    DnsRecord rec{ts, rtype, std::move(qname), ttl, std::move(answer)};
    if (auto err = validate(rec)) throw std::invalid_argument("DnsRecord: " + *err);
    return rec;
}

FlowRecord makeFlowRecord(std::int64_t ts, std::string srcIp, std::string dstIp,
                          int proto, int srcPort, int dstPort,
                          std::uint64_t packets, std::uint64_t bytes) {
    FlowRecord rec{ts, std::move(srcIp), std::move(dstIp), proto, srcPort, dstPort, packets, bytes};
    if (auto err = validate(rec)) throw std::invalid_argument("FlowRecord: " + *err);
    return rec;
}

CorrelatedRecord makeCorrelatedRecord(FlowRecord flow, std::vector<std::string> chain,
                                      int chainLimit) {
    CorrelatedRecord rec{std::move(flow), std::move(chain), std::nullopt};
    if (!rec.chain.empty()) rec.result = rec.chain.back();
    if (auto err = validate(rec, chainLimit)) throw std::invalid_argument("CorrelatedRecord: " + *err);
    return rec;
}

namespace {

// inet_pton wants a NUL-terminated string; reject anything that cannot be
// a textual address before copying.
bool parseAddr(std::string_view text, int af, void* dst) {
    if (text.empty() || text.size() >= INET6_ADDRSTRLEN) return false;
    std::array<char, INET6_ADDRSTRLEN> buf{};
    std::copy(text.begin(), text.end(), buf.begin());
    return inet_pton(af, buf.data(), dst) == 1;
}

}  // namespace

std::optional<IpFamily> ipFamilyOf(std::string_view text) {
    in_addr v4{};
    if (parseAddr(text, AF_INET, &v4)) return IpFamily::V4;
    in6_addr v6{};
    if (parseAddr(text, AF_INET6, &v6)) return IpFamily::V6;
    return std::nullopt;
}

bool isIpv4(std::string_view text) {
    in_addr v4{};
    return parseAddr(text, AF_INET, &v4);
}

bool isIpv6(std::string_view text) {
    in6_addr v6{};
    return parseAddr(text, AF_INET6, &v6);
}

std::optional<std::string> canonicalIp(std::string_view text) {
    char out[INET6_ADDRSTRLEN] = {};
    in_addr v4{};
    if (parseAddr(text, AF_INET, &v4)) {
        if (!inet_ntop(AF_INET, &v4, out, sizeof(out))) return std::nullopt;
        return std::string(out);
    }
    in6_addr v6{};
    if (parseAddr(text, AF_INET6, &v6)) {
        if (!inet_ntop(AF_INET6, &v6, out, sizeof(out))) return std::nullopt;
        return std::string(out);
    }
    return std::nullopt;
}

std::string normalizeDomain(std::string_view name) {
    while (!name.empty() && name.back() == '.') name.remove_suffix(1);
    std::string out(name);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace flowname
