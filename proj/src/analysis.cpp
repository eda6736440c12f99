#include "flowname/analysis.hpp"

#include <algorithm>
#include <fstream>

namespace flowname {

std::string_view violationName(DomainViolation v) {
    switch (v) {
        case DomainViolation::TooLong255: return "TooLong255";
        case DomainViolation::LabelTooLong63: return "LabelTooLong63";
        case DomainViolation::BadLabelChars: return "BadLabelChars";
    }
    return "?";
}

namespace {

bool isLetter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool isDigit(char c) { return c >= '0' && c <= '9'; }

bool labelCharsOk(std::string_view label, bool lenient) {
    if (label.empty()) return false;
    char first = label.front();
    if (!(isLetter(first) || (lenient && isDigit(first)))) return false;
    char last = label.back();
    if (!(isLetter(last) || isDigit(last))) return false;
    for (std::size_t i = 1; i + 1 < label.size(); ++i) {
        char c = label[i];
        if (!(isLetter(c) || isDigit(c) || c == '-')) return false;
    }
    return true;
}

}  // namespace

ValidityReport validateDomain(std::string_view name, bool lenient) {
    ValidityReport report;
    report.name = std::string(name);
    if (name.size() > 255) report.violations.insert(DomainViolation::TooLong255);
    if (name.empty()) {
        report.violations.insert(DomainViolation::BadLabelChars);
        return report;
    }
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t dot = name.find('.', start);
        std::string_view lab = dot == std::string_view::npos
                                   ? name.substr(start)
                                   : name.substr(start, dot - start);
        if (lab.size() > 63) report.violations.insert(DomainViolation::LabelTooLong63);
        if (!labelCharsOk(lab, lenient)) report.violations.insert(DomainViolation::BadLabelChars);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return report;
}

Parsed<Blocklist> Blocklist::load(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) return ParseError{0, "cannot open blocklist: " + path};
    Blocklist bl;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line[0] == '#') continue;
        auto fields = splitFields(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            return ParseError{lineNo, "expected: domain<TAB>category"};
        }
        bl.add(fields[0], fields[1]);
    }
    return bl;
}

void Blocklist::add(std::string_view domain, std::string_view category) {
    entries_[normalizeDomain(domain)] = std::string(category);
}

std::optional<std::string> Blocklist::match(std::string_view name) const {
    std::string normalized = normalizeDomain(name);
    std::string_view candidate = normalized;
    while (!candidate.empty()) {
        auto it = entries_.find(std::string(candidate));
        if (it != entries_.end()) return it->second;
        std::size_t dot = candidate.find('.');
        if (dot == std::string_view::npos) break;
        candidate.remove_prefix(dot + 1);
    }
    return std::nullopt;
}

TrafficAggregator::TrafficAggregator(const Blocklist* blocklist, bool lenient)
    : blocklist_(blocklist), lenient_(lenient) {}

void TrafficAggregator::add(const CorrelatedRecord& rec) {
    ++report_.records;
    report_.totalBytes += rec.flow.bytes;
    if (!rec.result) {
        report_.categoryBytes["uncorrelated"] += rec.flow.bytes;
        return;
    }
    report_.correlatedBytes += rec.flow.bytes;
    const std::string& domain = *rec.result;
    report_.domainBytes[domain] += rec.flow.bytes;

    std::string category = "ok";
    if (blocklist_) {
        if (auto cat = blocklist_->match(domain)) category = *cat;
    }
    if (category == "ok" && !validateDomain(domain, lenient_).valid()) {
        category = "invalid";
    }
    report_.categoryBytes[category] += rec.flow.bytes;
    perCategoryDomains_[category][domain] += rec.flow.bytes;
}

TrafficAggregator::Report TrafficAggregator::finish() const {
    Report out = report_;
    for (const auto& [category, domains] : perCategoryDomains_) {
        auto& ranked = out.ranking[category];
        ranked.reserve(domains.size());
        for (const auto& [domain, bytes] : domains) ranked.push_back({domain, bytes});
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.bytes != b.bytes) return a.bytes > b.bytes;
            return a.domain < b.domain;
        });
    }
    return out;
}

void writeCategoryCdfCsv(std::ostream& os, const TrafficAggregator::Report& report,
                         const std::string& category) {
    os << "rank,domain,bytes,cumulative_fraction\n";
    auto it = report.ranking.find(category);
    if (it == report.ranking.end()) return;
    auto catBytes = report.categoryBytes.find(category);
    const double total = catBytes != report.categoryBytes.end()
                             ? static_cast<double>(catBytes->second)
                             : 0.0;
    std::uint64_t running = 0;
    std::size_t rank = 0;
    for (const auto& entry : it->second) {
        ++rank;
        running += entry.bytes;
        double frac = total > 0 ? static_cast<double>(running) / total : 0.0;
        os << rank << ',' << entry.domain << ',' << entry.bytes << ',' << frac << '\n';
    }
}

Parsed<ResolverSet> ResolverSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) return ParseError{0, "cannot open resolver list: " + path};
    ResolverSet set;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line[0] == '#') continue;
        if (!ipFamilyOf(line)) return ParseError{lineNo, "not an IP address: " + line};
        set.add(line);
    }
    return set;
}

void ResolverSet::add(std::string_view ip) {
    if (auto canonical = canonicalIp(ip)) ips_.insert(*canonical);
}

bool ResolverSet::contains(std::string_view ip) const {
    auto canonical = canonicalIp(ip);
    return canonical && ips_.count(*canonical) > 0;
}

void CoverageAccumulator::add(const FlowRecord& flow) {
    if (flow.dstPort != 53 && flow.dstPort != 853) return;
    ++report_.dnsPortFlows;
    if (resolvers_->contains(flow.dstIp)) ++report_.publicResolverFlows;
}

std::optional<CoverageReport> CoverageAccumulator::finish() const {
    if (report_.dnsPortFlows == 0) return std::nullopt;
    return report_;
}

std::optional<CoverageReport> resolverCoverage(const std::vector<FlowRecord>& flows,
                                               const ResolverSet& resolvers) {
    CoverageAccumulator acc(resolvers);
    for (const auto& flow : flows) acc.add(flow);
    return acc.finish();
}

BidirReport bidirectionalReport(const std::vector<CorrelatedRecord>& records, bool lenient) {
    BidirReport report;

    // Cache validity per distinct result name; correlated outputs repeat
    // domains heavily.
    std::unordered_map<std::string, bool> malformed;
    auto isMalformed = [&](const std::string& name) {
        auto it = malformed.find(name);
        if (it == malformed.end()) {
            it = malformed.emplace(name, !validateDomain(name, lenient).valid()).first;
        }
        return it->second;
    };

    auto pairKey = [](const std::string& a, const std::string& b) { return a + '|' + b; };

    std::unordered_set<std::string> allDirections;  // srcIP|dstIP over every flow
    for (const auto& rec : records) {
        report.totalPackets += rec.flow.packets;
        allDirections.insert(pairKey(rec.flow.srcIp, rec.flow.dstIp));
    }

    // (remote, client) pairs from flows whose result is malformed.
    std::unordered_set<std::string> malformedPairs;
    std::unordered_set<std::string> clients;
    std::unordered_set<std::string> remotes;
    std::unordered_set<std::string> repliedPairs;
    std::unordered_set<std::string> clientsReplying;
    std::unordered_set<std::string> remotesRepliedTo;
    for (const auto& rec : records) {
        if (!rec.result || !isMalformed(*rec.result)) continue;
        ++report.malformedInboundFlows;
        const std::string& remote = rec.flow.srcIp;
        const std::string& client = rec.flow.dstIp;
        malformedPairs.insert(pairKey(remote, client));
        clients.insert(client);
        remotes.insert(remote);
        if (allDirections.count(pairKey(client, remote))) {
            repliedPairs.insert(pairKey(remote, client));
            clientsReplying.insert(client);
            remotesRepliedTo.insert(remote);
        }
    }

    for (const auto& rec : records) {
        const std::string forward = pairKey(rec.flow.srcIp, rec.flow.dstIp);
        const std::string reverse = pairKey(rec.flow.dstIp, rec.flow.srcIp);
        if (repliedPairs.count(forward) || repliedPairs.count(reverse)) {
            report.bidirectionalPackets += rec.flow.packets;
        }
    }

    report.clientsReceiving = clients.size();
    report.clientsReplying = clientsReplying.size();
    report.malformedRemotes = remotes.size();
    report.remotesRepliedTo = remotesRepliedTo.size();
    return report;
}

}  // namespace flowname
