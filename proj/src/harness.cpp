#include "flowname/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

#include "flowname/dns_pipeline.hpp"
#include "flowname/flow_pipeline.hpp"
#include "flowname/io.hpp"

namespace flowname {

std::int64_t TtlModel::draw(Rng& rng) const {
    double u = rng.unit();
    if (u < shortFrac) return rng.uniform(shortMin, shortMax);
    if (u < shortFrac + midFrac) return rng.uniform(shortMax + 1, midMax);
    return rng.uniform(midMax + 1, longMax);
}

std::optional<std::string> WorkloadSpec::validate() const {
    if (durationSeconds < 0) return "duration must be >= 0";
    if (startTs < 0) return "start-ts must be >= 0";
    if (dnsRate < 0 || flowRate < 0) return "rates must be >= 0";
    if (numServices < 1) return "services must be >= 1";
    if (cnameDepthMin < 0 || cnameDepthMax < cnameDepthMin) return "bad cname depth range";
    if (ttl.shortFrac < 0 || ttl.midFrac < 0 || ttl.shortFrac + ttl.midFrac > 1.0) {
        return "bad ttl mixture";
    }
    return std::nullopt;
}

WorkloadSpec scenarioSpec(int scenario) {
    WorkloadSpec spec;
    spec.numServices = 2;
    spec.cnameDepthMin = 1;
    spec.cnameDepthMax = 1;
    spec.durationSeconds = 20;
    spec.flowRate = 50;
    spec.dnsRate = 0;  // only the service chains
    spec.ttl.shortFrac = 1.0;
    spec.ttl.midFrac = 0.0;
    spec.ttl.shortMin = 120;
    spec.ttl.shortMax = 120;
    spec.ipSharing = scenario == 2 ? IpSharing::SharedIp : IpSharing::Disjoint;
    spec.seed = 7;
    return spec;
}

namespace {

std::string truthKey(std::int64_t ts, const std::string& src, const std::string& dst,
                     int sport, int dport) {
    return std::to_string(ts) + '|' + src + '|' + dst + '|' + std::to_string(sport) + '|' +
           std::to_string(dport);
}

std::string projectionKey(std::int64_t ts, const std::string& src, const std::string& dst) {
    return std::to_string(ts) + '|' + src + '|' + dst;
}

}  // namespace

void GroundTruth::add(const FlowRecord& flow, const std::string& domain) {
    full_[truthKey(flow.ts, flow.srcIp, flow.dstIp, flow.srcPort, flow.dstPort)] = domain;
    std::string pkey = projectionKey(flow.ts, flow.srcIp, flow.dstIp);
    auto [it, inserted] = projected_.emplace(pkey, domain);
    if (!inserted && it->second != domain) {
        projectionAmbiguous_ = true;
        ambiguousKey_ = pkey;
    }
}

std::optional<std::string> GroundTruth::lookup(const FlowRecord& flow) const {
    auto it = full_.find(truthKey(flow.ts, flow.srcIp, flow.dstIp, flow.srcPort, flow.dstPort));
    if (it == full_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> GroundTruth::lookupProjection(std::int64_t ts,
                                                         const std::string& srcIp,
                                                         const std::string& dstIp) const {
    auto it = projected_.find(projectionKey(ts, srcIp, dstIp));
    if (it == projected_.end()) return std::nullopt;
    return it->second;
}

void GroundTruth::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out.is_open()) throw std::runtime_error("cannot write truth file: " + path);
    for (const auto& [key, domain] : full_) {
        std::string row = key;
        std::replace(row.begin(), row.end(), '|', '\t');
        out << row << '\t' << domain << '\n';
    }
}

Parsed<GroundTruth> GroundTruth::load(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) return ParseError{0, "cannot open truth file: " + path};
    GroundTruth truth;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        auto fields = splitFields(line);
        if (fields.size() != 6) return ParseError{lineNo, "expected 6 fields in truth file"};
        auto ts = parseI64(fields[0]);
        auto sport = parseIntInRange(fields[3], 0, 65535);
        auto dport = parseIntInRange(fields[4], 0, 65535);
        if (!ts || !sport || !dport || fields[5].empty()) {
            return ParseError{lineNo, "bad truth row"};
        }
        FlowRecord flow;
        flow.ts = *ts;
        flow.srcIp = std::string(fields[1]);
        flow.dstIp = std::string(fields[2]);
        flow.srcPort = *sport;
        flow.dstPort = *dport;
        truth.add(flow, std::string(fields[5]));
    }
    if (truth.projectionAmbiguous_) {
        return ParseError{0, "ambiguous truth projection for " + truth.ambiguousKey_};
    }
    return truth;
}

namespace {

struct Service {
    std::string domain;
    std::string ip;
    std::vector<std::string> chainNames;  // domain, then edge names outward
    std::int64_t ttl = 120;
};

std::string serviceIp(int index, IpSharing sharing) {
    if (sharing == IpSharing::SharedIp) return "203.0.113.1";
    if (index < 200) return "203.0.113." + std::to_string(index + 1);
    int hi = index / 200;
    return "198.18." + std::to_string(hi) + "." + std::to_string(index % 200 + 1);
}

std::string clientIp(std::uint64_t flowIndex) {
    return "10." + std::to_string((flowIndex >> 16) & 0xff) + "." +
           std::to_string((flowIndex >> 8) & 0xff) + "." + std::to_string(flowIndex & 0xff);
}

std::string noiseIp(std::uint64_t n) {
    return "198.51.100." + std::to_string(n % 254 + 1);
}

// DNS records that resolve this service: the CNAME links from the service
// domain out to the edge name, then the A record on the edge.
std::vector<DnsRecord> chainRecords(const Service& svc, std::int64_t ts) {
    std::vector<DnsRecord> records;
    for (std::size_t i = 0; i + 1 < svc.chainNames.size(); ++i) {
        records.push_back({ts, RType::CNAME, svc.chainNames[i], svc.ttl, svc.chainNames[i + 1]});
    }
    records.push_back({ts, RType::A, svc.chainNames.back(), svc.ttl, svc.ip});
    return records;
}

}  // namespace

GeneratedWorkload generateWorkload(const WorkloadSpec& spec, const std::string& dir) {
    if (auto err = spec.validate()) throw std::invalid_argument("workload spec: " + *err);
    std::filesystem::create_directories(dir);

    GeneratedWorkload out;
    out.dnsPath = (std::filesystem::path(dir) / "dns.tsv").string();
    out.flowPath = (std::filesystem::path(dir) / "flows.tsv").string();
    out.truthPath = (std::filesystem::path(dir) / "truth.tsv").string();

    std::ofstream dnsOut(out.dnsPath, std::ios::trunc);
    std::ofstream flowOut(out.flowPath, std::ios::trunc);
    if (!dnsOut.is_open() || !flowOut.is_open()) {
        throw std::runtime_error("cannot write workload files in " + dir);
    }

    Rng rng(spec.seed);
    GroundTruth truth;

    std::vector<Service> services;
    services.reserve(static_cast<std::size_t>(spec.numServices));
    for (int k = 0; k < spec.numServices; ++k) {
        Service svc;
        svc.domain = "svc" + std::to_string(k) + ".example.net";
        svc.ip = serviceIp(k, spec.ipSharing);
        svc.ttl = spec.ttl.draw(rng);
        int depth = static_cast<int>(rng.uniform(spec.cnameDepthMin, spec.cnameDepthMax));
        svc.chainNames.push_back(svc.domain);
        for (int j = 1; j <= depth; ++j) {
            svc.chainNames.push_back("edge" + std::to_string(k) + "-" + std::to_string(j) +
                                     ".cdn.example");
        }
        services.push_back(std::move(svc));
    }

    auto emitDns = [&](const DnsRecord& rec) {
        dnsOut << formatDnsLine(rec) << '\n';
        ++out.dnsRecords;
    };

    // Service chains first, one service per second: with a shared IP the
    // second service's A record must arrive after (and overwrite) the first.
    for (std::size_t k = 0; k < services.size(); ++k) {
        for (const auto& rec : chainRecords(services[k], spec.startTs + static_cast<std::int64_t>(k))) {
            emitDns(rec);
        }
    }

    const std::int64_t flowStart = spec.startTs + spec.numServices + 1;
    std::uint64_t flowIndex = 0;
    std::uint64_t noiseIndex = 0;
    for (std::int64_t second = 0; second < spec.durationSeconds; ++second) {
        const std::int64_t ts = flowStart + second;

        for (std::int64_t r = 0; r < spec.dnsRate; ++r) {
            if (rng.unit() < 0.5 && spec.ipSharing == IpSharing::Disjoint) {
                // Chain refresh. Skipped for shared IPs: re-emitting A records
                // would scramble the deliberate last-writer ordering.
                const Service& svc =
                    services[static_cast<std::size_t>(rng.uniform(0, spec.numServices - 1))];
                auto records = chainRecords(svc, ts);
                emitDns(records[static_cast<std::size_t>(
                    rng.uniform(0, static_cast<std::int64_t>(records.size()) - 1))]);
            } else {
                // Unrelated noise on addresses and names no flow ever uses.
                ++noiseIndex;
                DnsRecord rec;
                rec.ts = ts;
                rec.ttl = spec.ttl.draw(rng);
                if (rng.unit() < 0.5) {
                    rec.rtype = RType::A;
                    rec.qname = "host" + std::to_string(noiseIndex) + ".noise.example";
                    rec.answer = noiseIp(rng.next());
                } else {
                    rec.rtype = RType::CNAME;
                    rec.qname = "alias" + std::to_string(noiseIndex) + ".noise.example";
                    rec.answer = "target" + std::to_string(noiseIndex) + ".noise.example";
                }
                emitDns(rec);
            }
        }

        for (std::int64_t r = 0; r < spec.flowRate; ++r) {
            const Service& svc =
                services[static_cast<std::size_t>(flowIndex % services.size())];
            FlowRecord flow;
            flow.ts = ts;
            flow.srcIp = svc.ip;
            flow.dstIp = clientIp(flowIndex);
            flow.proto = 6;
            flow.srcPort = 443;
            flow.dstPort = static_cast<int>(20000 + flowIndex % 40000);
            flow.packets = static_cast<std::uint64_t>(rng.uniform(1, 20));
            flow.bytes = static_cast<std::uint64_t>(rng.uniform(200, 20000));
            flowOut << formatFlowLine(flow) << '\n';
            truth.add(flow, svc.domain);
            ++flowIndex;
        }
    }
    out.flowRecords = flowIndex;

    dnsOut.close();
    flowOut.close();
    truth.save(out.truthPath);
    return out;
}

Parsed<AccuracyReport> evaluateAccuracy(const std::vector<std::string>& correlatedFiles,
                                        const std::string& truthPath) {
    auto truth = GroundTruth::load(truthPath);
    if (!truth) return truth.error();

    AccuracyReport report;
    for (const auto& file : correlatedFiles) {
        std::ifstream in(file);
        if (!in.is_open()) return ParseError{0, "cannot open correlated file: " + file};
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            auto rec = parseOutputLine(line, lineNo);
            if (!rec) return rec.error();
            const auto& flow = rec.value().flow;
            auto expected = truth.value().lookupProjection(flow.ts, flow.srcIp, flow.dstIp);
            if (!expected) {
                return ParseError{lineNo, "flow not present in ground truth: " + file};
            }
            ++report.flows;
            if (rec.value().result && *rec.value().result == *expected) ++report.resultCorrect;
            const auto& chain = rec.value().chain;
            if (std::find(chain.begin(), chain.end(), *expected) != chain.end()) {
                ++report.chainContains;
            }
        }
    }
    return report;
}

Parsed<DistributionMetrics> distributionMetrics(const std::string& dnsPath,
                                                const RunReport& report,
                                                std::int64_t window) {
    if (window <= 0) return ParseError{0, "window must be positive"};
    std::ifstream in(dnsPath);
    if (!in.is_open()) return ParseError{0, "cannot open dns file: " + dnsPath};

    DistributionMetrics out;
    out.chainLengthHist = report.chainLengthHist;

    std::map<std::int64_t, std::uint64_t> ttlCounts;
    std::unordered_map<std::string, std::set<std::string>> namesPerIpWindow;
    std::optional<std::int64_t> firstTs;
    std::uint64_t ttlTotal = 0;

    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto rec = parseDnsLine(line, lineNo);
        if (!rec) continue;  // distribution over parseable records
        ++ttlTotal;
        ++ttlCounts[rec.value().ttl];
        if (rec.value().rtype == RType::A || rec.value().rtype == RType::AAAA) {
            if (!firstTs) firstTs = rec.value().ts;
            std::int64_t w = (rec.value().ts - *firstTs) / window;
            namesPerIpWindow[std::to_string(w) + '|' + rec.value().answer].insert(
                rec.value().qname);
        }
    }

    std::uint64_t running = 0;
    for (const auto& [ttl, count] : ttlCounts) {
        running += count;
        out.ttlCdf.push_back(
            {ttl, static_cast<double>(running) / static_cast<double>(ttlTotal)});
    }

    std::map<std::int64_t, std::uint64_t> nameCountHist;
    for (const auto& [key, names] : namesPerIpWindow) {
        ++nameCountHist[static_cast<std::int64_t>(names.size())];
    }
    std::uint64_t ipTotal = 0;
    for (const auto& [count, ips] : nameCountHist) ipTotal += ips;
    running = 0;
    for (const auto& [count, ips] : nameCountHist) {
        running += ips;
        out.namesPerIpCdf.push_back(
            {count, static_cast<double>(running) / static_cast<double>(ipTotal)});
    }
    return out;
}

Parsed<BenchResult> runBenchmark(const EngineConfig& cfg, const std::string& dnsPath,
                                 const std::string& flowPath, const std::string& outDir,
                                 std::int64_t namesPerIpWindow) {
    auto dnsSpec = SourceSpec::parse(dnsPath);
    auto flowSpec = SourceSpec::parse(flowPath);
    if (!dnsSpec) return dnsSpec.error();
    if (!flowSpec) return flowSpec.error();

    BenchResult result;
    Engine engine(cfg, {dnsSpec.value()}, {flowSpec.value()}, outDir);
    result.report = engine.run();

    auto dist = distributionMetrics(dnsPath, result.report, namesPerIpWindow);
    if (!dist) return dist.error();
    result.distributions = std::move(dist.value());

    std::filesystem::create_directories(outDir);
    auto path = [&](const char* name) {
        return (std::filesystem::path(outDir) / name).string();
    };

    result.metricsPath = path("metrics.txt");
    {
        std::ofstream os(result.metricsPath, std::ios::trunc);
        os << "variant=" << variantName(cfg.variant) << '\n';
        os << "dns_path=" << dnsPath << '\n';
        os << "flow_path=" << flowPath << '\n';
        result.report.writeKeyValues(os);
    }
    {
        std::ofstream os(path("chain_length.csv"), std::ios::trunc);
        os << "length,count\n";
        for (std::size_t i = 0; i < result.distributions.chainLengthHist.size(); ++i) {
            os << i << ',' << result.distributions.chainLengthHist[i] << '\n';
        }
    }
    {
        std::ofstream os(path("ttl_cdf.csv"), std::ios::trunc);
        os << "ttl,cumulative_fraction\n";
        for (const auto& p : result.distributions.ttlCdf) {
            os << p.value << ',' << p.cumulativeFraction << '\n';
        }
    }
    {
        std::ofstream os(path("names_per_ip_cdf.csv"), std::ios::trunc);
        os << "names,cumulative_fraction\n";
        for (const auto& p : result.distributions.namesPerIpCdf) {
            os << p.value << ',' << p.cumulativeFraction << '\n';
        }
    }
    {
        std::ofstream os(path("entry_series.csv"), std::ios::trunc);
        os << "logical_ts,total_entries\n";
        for (const auto& [ts, entries] : result.report.entrySeries) {
            os << ts << ',' << entries << '\n';
        }
    }
    return result;
}

}  // namespace flowname
