#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flowname {

// Resource-record types the correlator cares about. Everything that is not
// an address or alias record is folded into Other and dropped downstream.
enum class RType { A, AAAA, CNAME, Other };

std::string_view rtypeName(RType t);
std::optional<RType> rtypeFromName(std::string_view name);

// Engine behavior variants for benchmarking. Main is the fully featured mode.
enum class Variant { Main, NoSplit, NoClearUp, NoRotation, NoLongMaps, ExactTtl };

std::string_view variantName(Variant v);
std::optional<Variant> variantFromName(std::string_view name);

// One parsed DNS answer, the unit that fills the store.
struct DnsRecord {
    std::int64_t ts = 0;   // seconds since epoch
    RType rtype = RType::Other;
    std::string qname;     // queried name
    std::int64_t ttl = 0;  // seconds
    std::string answer;    // IP text for A/AAAA, domain name for CNAME

    bool operator==(const DnsRecord&) const = default;
};

// One flow observation, the unit that queries the store.
struct FlowRecord {
    std::int64_t ts = 0;
    std::string srcIp;
    std::string dstIp;
    int proto = 0;
    int srcPort = 0;
    int dstPort = 0;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;

    bool operator==(const FlowRecord&) const = default;
};

// A flow joined with its resolved name chain. chain[0] is the name from the
// IP lookup, each further element one CNAME hop; result is the last element.
struct CorrelatedRecord {
    FlowRecord flow;
    std::vector<std::string> chain;
    std::optional<std::string> result;

    bool correlated() const { return result.has_value(); }
    bool operator==(const CorrelatedRecord&) const = default;
};

// All engine tunables.
struct EngineConfig {
    std::int64_t aClearUpInterval = 3600;  // IP-NAME rotation interval
    std::int64_t cClearUpInterval = 7200;  // NAME-CNAME rotation interval
    std::optional<std::int64_t> longClearUpInterval;  // unset = never cleared
    int numSplit = 10;
    int chainLimit = 6;
    Variant variant = Variant::Main;
    std::size_t queueCapacity = 65536;
    int fillWorkers = 2;
    int lookupWorkers = 2;
    int writeWorkers = 2;
    std::int64_t rollInterval = 3600;  // output file roll, logical seconds
    bool useDstIp = false;

    // Applies variant-forced settings (NoSplit => numSplit = 1).
    EngineConfig normalized() const;
    // Returns an error description when any field is out of range.
    std::optional<std::string> validate() const;
};

// --- validation -------------------------------------------------------------

std::optional<std::string> validate(const DnsRecord& rec);
std::optional<std::string> validate(const FlowRecord& rec);
std::optional<std::string> validate(const CorrelatedRecord& rec, int chainLimit = 6);

// Throwing factories for call sites that require a well-formed record.
DnsRecord makeDnsRecord(std::int64_t ts, RType rtype, std::string qname,
                        std::int64_t ttl, std::string answer);
FlowRecord makeFlowRecord(std::int64_t ts, std::string srcIp, std::string dstIp,
                          int proto, int srcPort, int dstPort,
                          std::uint64_t packets, std::uint64_t bytes);
CorrelatedRecord makeCorrelatedRecord(FlowRecord flow, std::vector<std::string> chain,
                                      int chainLimit = 6);

// --- IP / domain-name helpers -----------------------------------------------

enum class IpFamily { V4, V6 };

std::optional<IpFamily> ipFamilyOf(std::string_view text);
bool isIpv4(std::string_view text);
bool isIpv6(std::string_view text);

// Parses and reformats an address so that textual variants of the same
// address ("2001:DB8::1" vs "2001:db8::1") hash to the same shard.
std::optional<std::string> canonicalIp(std::string_view text);

// Lowercases ASCII letters and strips trailing dots. DNS names are
// case-insensitive; non-ASCII bytes (IDN) are carried verbatim.
std::string normalizeDomain(std::string_view name);

}  // namespace flowname
