#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "flowname/model.hpp"
#include "flowname/parse.hpp"

namespace flowname {

// The three domain-name rules checked on correlated names. Byte lengths are
// measured on the UTF-8 encoding; label characters are the ASCII
// letter-digit-hyphen set.
enum class DomainViolation { TooLong255, LabelTooLong63, BadLabelChars };

std::string_view violationName(DomainViolation v);

struct ValidityReport {
    std::string name;
    std::set<DomainViolation> violations;

    bool valid() const { return violations.empty(); }
};

// lenient relaxes the letter-first rule to allow leading digits, which are
// common in practice but outside the strict rule set.
ValidityReport validateDomain(std::string_view name, bool lenient = false);

// Local domain blocklist: name -> category (spam, botnet_cc, redirector,
// malware, phish, ...). File format: domain \t category, '#' comments.
class Blocklist {
public:
    static Parsed<Blocklist> load(const std::string& path);

    void add(std::string_view domain, std::string_view category);
    std::size_t size() const { return entries_.size(); }

    // Longest-suffix match on label boundaries; nullopt when nothing matches.
    std::optional<std::string> match(std::string_view name) const;

private:
    std::unordered_map<std::string, std::string> entries_;
};

inline std::optional<std::string> matchBlocklist(std::string_view name, const Blocklist& bl) {
    return bl.match(name);
}

// Per-domain and per-category byte accounting over correlated output.
// Categories: each blocklist category, then "invalid", "uncorrelated", "ok";
// every record lands in exactly one, so category bytes sum to total bytes.
class TrafficAggregator {
public:
    struct DomainBytes {
        std::string domain;
        std::uint64_t bytes = 0;
    };

    struct Report {
        std::uint64_t totalBytes = 0;
        std::uint64_t correlatedBytes = 0;
        std::uint64_t records = 0;
        std::map<std::string, std::uint64_t> categoryBytes;
        std::map<std::string, std::uint64_t> domainBytes;  // correlated domains only
        // Per category: domains ranked by bytes descending.
        std::map<std::string, std::vector<DomainBytes>> ranking;

        double correlationRate() const {
            return totalBytes ? static_cast<double>(correlatedBytes) /
                                    static_cast<double>(totalBytes)
                              : 0.0;
        }
    };

    TrafficAggregator(const Blocklist* blocklist, bool lenient);

    void add(const CorrelatedRecord& rec);
    Report finish() const;

private:
    const Blocklist* blocklist_;
    bool lenient_;
    Report report_;
    std::map<std::string, std::map<std::string, std::uint64_t>> perCategoryDomains_;
};

// CSV rows: rank,domain,bytes,cumulative_fraction (fraction of the category's
// bytes covered by the top `rank` domains).
void writeCategoryCdfCsv(std::ostream& os, const TrafficAggregator::Report& report,
                         const std::string& category);

// Public resolver list: one IP per line, '#' comments.
class ResolverSet {
public:
    static Parsed<ResolverSet> load(const std::string& path);

    void add(std::string_view ip);
    bool contains(std::string_view ip) const;
    std::size_t size() const { return ips_.size(); }

private:
    std::unordered_set<std::string> ips_;
};

struct CoverageReport {
    std::uint64_t dnsPortFlows = 0;      // flows with dstPort 53 or 853
    std::uint64_t publicResolverFlows = 0;

    double publicFraction() const {
        return static_cast<double>(publicResolverFlows) / static_cast<double>(dnsPortFlows);
    }
    double coverage() const { return 1.0 - publicFraction(); }
};

class CoverageAccumulator {
public:
    explicit CoverageAccumulator(const ResolverSet& resolvers) : resolvers_(&resolvers) {}

    void add(const FlowRecord& flow);
    // nullopt when the stream contained no DNS-port flows (undefined ratio).
    std::optional<CoverageReport> finish() const;

private:
    const ResolverSet* resolvers_;
    CoverageReport report_;
};

std::optional<CoverageReport> resolverCoverage(const std::vector<FlowRecord>& flows,
                                               const ResolverSet& resolvers);

// Return-traffic analysis for flows attributed to malformed domains.
// Convention matches the engine's source-IP attribution: the remote is the
// flow's srcIP, the client its dstIP.
struct BidirReport {
    std::uint64_t malformedInboundFlows = 0;
    std::uint64_t clientsReceiving = 0;   // distinct clients of malformed remotes
    std::uint64_t clientsReplying = 0;    // ... that sent traffic back
    std::uint64_t malformedRemotes = 0;   // distinct remotes with malformed names
    std::uint64_t remotesRepliedTo = 0;
    std::uint64_t bidirectionalPackets = 0;  // both directions of replied pairs
    std::uint64_t totalPackets = 0;

    double clientFraction() const {
        return clientsReceiving ? static_cast<double>(clientsReplying) /
                                      static_cast<double>(clientsReceiving)
                                : 0.0;
    }
    double remoteFraction() const {
        return malformedRemotes ? static_cast<double>(remotesRepliedTo) /
                                      static_cast<double>(malformedRemotes)
                                : 0.0;
    }
    double packetShare() const {
        return totalPackets ? static_cast<double>(bidirectionalPackets) /
                                  static_cast<double>(totalPackets)
                            : 0.0;
    }
};

BidirReport bidirectionalReport(const std::vector<CorrelatedRecord>& records,
                                bool lenient = false);

}  // namespace flowname
