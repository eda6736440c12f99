#include "flowname/dns_pipeline.hpp"

#include <cctype>

namespace flowname {

namespace {

bool isRtypeToken(std::string_view token) {
    if (token.empty()) return false;
    for (unsigned char c : token) {
        if (!std::isalnum(c) && c != '_' && c != '-') return false;
    }
    return true;
}

}  // namespace

Parsed<DnsRecord> parseDnsLine(std::string_view line, std::size_t lineNo) {
    auto fields = splitFields(line);
    if (fields.size() != 5) {
        return ParseError{lineNo, "expected 5 tab-separated fields, got " +
                                      std::to_string(fields.size())};
    }
    auto ts = parseI64(fields[0]);
    if (!ts || *ts < 0) return ParseError{lineNo, "bad ts field"};
    if (!isRtypeToken(fields[1])) return ParseError{lineNo, "bad rtype field"};
    auto ttl = parseI64(fields[3]);
    if (!ttl || *ttl < 0) return ParseError{lineNo, "bad ttl field"};
    if (fields[2].empty()) return ParseError{lineNo, "empty qname"};
    if (fields[4].empty()) return ParseError{lineNo, "empty answer"};

    DnsRecord rec;
    rec.ts = *ts;
    rec.ttl = *ttl;
    rec.rtype = rtypeFromName(fields[1]).value_or(RType::Other);
    rec.qname = normalizeDomain(fields[2]);
    if (rec.qname.empty()) return ParseError{lineNo, "empty qname"};
    if (rec.rtype == RType::A || rec.rtype == RType::AAAA) {
        // Canonical address text so fill keys and lookup keys agree.
        rec.answer = canonicalIp(fields[4]).value_or(std::string(fields[4]));
    } else {
        rec.answer = normalizeDomain(fields[4]);
        if (rec.answer.empty()) return ParseError{lineNo, "empty answer"};
    }
    return rec;
}

std::string formatDnsLine(const DnsRecord& rec) {
    std::string out;
    out.reserve(rec.qname.size() + rec.answer.size() + 32);
    out += std::to_string(rec.ts);
    out += '\t';
    out += rtypeName(rec.rtype);
    out += '\t';
    out += rec.qname;
    out += '\t';
    out += std::to_string(rec.ttl);
    out += '\t';
    out += rec.answer;
    return out;
}

bool filterValidResponse(const DnsRecord& rec) {
    if (rec.ttl < 0 || rec.answer.empty() || rec.qname.empty()) return false;
    switch (rec.rtype) {
        case RType::A: return isIpv4(rec.answer);
        case RType::AAAA: return isIpv6(rec.answer);
        case RType::CNAME: return true;
        case RType::Other: return false;
    }
    return false;
}

FillWorkerStats fillUpWorker(FillUpQueue& queue, MapStore& store,
                             const FillWorkerOptions& opts) {
    FillWorkerStats stats;
    while (auto rec = queue.pop()) {
        if (opts.gate) opts.gate->awaitTurn(opts.gateId, rec->ts);
        store.fill(*rec);
        ++stats.filled;
        if (opts.onFilled) opts.onFilled(*rec);
    }
    if (opts.gate) opts.gate->markDone(opts.gateId);
    return stats;
}

}  // namespace flowname
