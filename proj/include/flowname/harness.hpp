#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flowname/engine.hpp"
#include "flowname/metrics.hpp"
#include "flowname/model.hpp"
#include "flowname/parse.hpp"

namespace flowname {

// Deterministic draws on top of mt19937_64. Distribution helpers are written
// out by hand: the standard distributions are not pinned across library
// implementations, and workload bytes must be reproducible from the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Inclusive bounds.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next() %
                                              static_cast<std::uint64_t>(hi - lo + 1));
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

// Qualitative TTL mixture: most records short-lived, a thin long tail.
struct TtlModel {
    double shortFrac = 0.70;
    std::int64_t shortMin = 10;
    std::int64_t shortMax = 300;
    double midFrac = 0.29;
    std::int64_t midMax = 3600;
    std::int64_t longMax = 10800;

    std::int64_t draw(Rng& rng) const;
};

enum class IpSharing { Disjoint, SharedIp };

struct WorkloadSpec {
    std::int64_t durationSeconds = 60;
    std::int64_t startTs = 1'000'000;
    // Extra DNS records per logical second (chain refresh + unrelated noise)
    // on top of the per-service chains emitted at the start.
    std::int64_t dnsRate = 10;
    std::int64_t flowRate = 100;
    int numServices = 2;
    int cnameDepthMin = 0;
    int cnameDepthMax = 3;
    TtlModel ttl;
    IpSharing ipSharing = IpSharing::Disjoint;
    std::uint64_t seed = 1;

    std::optional<std::string> validate() const;
};

// The two controlled accuracy scenarios: two services, distinct domains,
// distinct vs shared service IPs, with the second service's DNS arriving
// after the first.
WorkloadSpec scenarioSpec(int scenario);

// Flow identity -> true service domain, stored as
// ts \t srcIP \t dstIP \t srcPort \t dstPort \t domain.
class GroundTruth {
public:
    static Parsed<GroundTruth> load(const std::string& path);

    void add(const FlowRecord& flow, const std::string& domain);
    std::optional<std::string> lookup(const FlowRecord& flow) const;
    // Join key available in correlated output (no ports there); fails load
    // when two truth rows project to the same key with different domains.
    std::optional<std::string> lookupProjection(std::int64_t ts, const std::string& srcIp,
                                                const std::string& dstIp) const;
    void save(const std::string& path) const;
    std::size_t size() const { return full_.size(); }

private:
    std::map<std::string, std::string> full_;
    std::map<std::string, std::string> projected_;
    bool projectionAmbiguous_ = false;
    std::string ambiguousKey_;
};

struct GeneratedWorkload {
    std::string dnsPath;
    std::string flowPath;
    std::string truthPath;
    std::uint64_t dnsRecords = 0;
    std::uint64_t flowRecords = 0;
};

// Writes dns.tsv / flows.tsv / truth.tsv into dir. Deterministic under the
// spec seed; both record files are sorted by timestamp and every flow is
// preceded by the DNS records that resolve it.
GeneratedWorkload generateWorkload(const WorkloadSpec& spec, const std::string& dir);

struct AccuracyReport {
    std::uint64_t flows = 0;
    std::uint64_t resultCorrect = 0;
    std::uint64_t chainContains = 0;

    // Vacuously 1.0 for an empty evaluation.
    double accuracy() const {
        return flows ? static_cast<double>(resultCorrect) / static_cast<double>(flows) : 1.0;
    }
    double chainAccuracy() const {
        return flows ? static_cast<double>(chainContains) / static_cast<double>(flows) : 1.0;
    }
};

// Compares correlated output files against ground truth; a flow in the
// output that is missing from the truth is an evaluation error.
Parsed<AccuracyReport> evaluateAccuracy(const std::vector<std::string>& correlatedFiles,
                                        const std::string& truthPath);

struct CdfPoint {
    std::int64_t value = 0;
    double cumulativeFraction = 0.0;
};

struct DistributionMetrics {
    std::vector<std::uint64_t> chainLengthHist;  // from the run's resolve traces
    std::vector<CdfPoint> ttlCdf;                // from the DNS input
    std::vector<CdfPoint> namesPerIpCdf;         // distinct names per IP per window
};

// window: logical seconds per names-per-IP sample (default 300).
Parsed<DistributionMetrics> distributionMetrics(const std::string& dnsPath,
                                                const RunReport& report,
                                                std::int64_t window = 300);

struct BenchResult {
    RunReport report;
    DistributionMetrics distributions;
    std::string metricsPath;
};

// Full pipeline run under cfg plus the distribution metrics; writes
// metrics.txt and the CSV distributions into outDir.
Parsed<BenchResult> runBenchmark(const EngineConfig& cfg, const std::string& dnsPath,
                                 const std::string& flowPath, const std::string& outDir,
                                 std::int64_t namesPerIpWindow = 300);

}  // namespace flowname
