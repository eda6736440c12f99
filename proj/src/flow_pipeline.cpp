#include "flowname/flow_pipeline.hpp"

#include <ctime>

namespace flowname {

Parsed<FlowRecord> parseFlowLine(std::string_view line, std::size_t lineNo) {
    auto fields = splitFields(line);
    if (fields.size() != 8) {
        return ParseError{lineNo, "expected 8 tab-separated fields, got " +
                                      std::to_string(fields.size())};
    }
    auto ts = parseI64(fields[0]);
    if (!ts || *ts < 0) return ParseError{lineNo, "bad ts field"};
    auto src = canonicalIp(fields[1]);
    if (!src) return ParseError{lineNo, "bad srcIP field"};
    auto dst = canonicalIp(fields[2]);
    if (!dst) return ParseError{lineNo, "bad dstIP field"};
    auto proto = parseIntInRange(fields[3], 0, 255);
    if (!proto) return ParseError{lineNo, "bad proto field"};
    auto srcPort = parseIntInRange(fields[4], 0, 65535);
    if (!srcPort) return ParseError{lineNo, "bad srcPort field"};
    auto dstPort = parseIntInRange(fields[5], 0, 65535);
    if (!dstPort) return ParseError{lineNo, "bad dstPort field"};
    auto packets = parseU64(fields[6]);
    if (!packets || *packets < 1) return ParseError{lineNo, "bad packets field"};
    auto bytes = parseU64(fields[7]);
    if (!bytes || *bytes < 1) return ParseError{lineNo, "bad bytes field"};

    FlowRecord rec;
    rec.ts = *ts;
    rec.srcIp = std::move(*src);
    rec.dstIp = std::move(*dst);
    rec.proto = *proto;
    rec.srcPort = *srcPort;
    rec.dstPort = *dstPort;
    rec.packets = *packets;
    rec.bytes = *bytes;
    return rec;
}

std::string formatFlowLine(const FlowRecord& rec) {
    std::string out;
    out.reserve(rec.srcIp.size() + rec.dstIp.size() + 48);
    out += std::to_string(rec.ts);
    out += '\t';
    out += rec.srcIp;
    out += '\t';
    out += rec.dstIp;
    out += '\t';
    out += std::to_string(rec.proto);
    out += '\t';
    out += std::to_string(rec.srcPort);
    out += '\t';
    out += std::to_string(rec.dstPort);
    out += '\t';
    out += std::to_string(rec.packets);
    out += '\t';
    out += std::to_string(rec.bytes);
    return out;
}

CorrelatedRecord resolve(MapStore& store, const FlowRecord& flow, std::int64_t nowTs,
                         ResolveStats* stats) {
    const EngineConfig& cfg = store.config();
    const bool exactTtl = cfg.variant == Variant::ExactTtl;
    const std::string& key = cfg.useDstIp ? flow.dstIp : flow.srcIp;

    CorrelatedRecord out;
    out.flow = flow;

    auto first = store.ipName().deepLookUpEntry(key, nowTs);
    if (!first) return out;
    if (stats) stats->ipNameHit = true;

    std::int64_t minExpiry = first->expiry;
    out.chain.push_back(std::move(first->value));
    std::string current = out.chain.back();
    int hops = 0;
    while (hops < cfg.chainLimit) {
        auto next = store.nameCname().deepLookUpEntry(current, nowTs);
        if (!next) break;
        ++hops;
        if (exactTtl && next->expiry != MapFamily::kNoExpiry &&
            (minExpiry == MapFamily::kNoExpiry || next->expiry < minExpiry)) {
            minExpiry = next->expiry;
        }
        bool selfAlias = next->value == current;
        out.chain.push_back(std::move(next->value));
        if (selfAlias) break;
        current = out.chain.back();
    }
    out.result = out.chain.back();

    bool truncated = hops == cfg.chainLimit;
    if (stats) {
        stats->cnameHits = hops;
        stats->truncated = truncated;
    }
    if (hops >= 2 && !truncated) {
        store.memoizeChain(out.chain.front(), *out.result,
                           exactTtl ? minExpiry : MapFamily::kNoExpiry);
        if (stats) stats->memoized = true;
    }
    return out;
}

LookUpWorkerStats lookUpWorker(LookUpQueue& queue, MapStore& store, WriteQueue& out,
                               const LookUpWorkerOptions& opts) {
    LookUpWorkerStats stats;
    while (auto flow = queue.pop()) {
        std::int64_t logicalTs = opts.useWallClock
                                     ? static_cast<std::int64_t>(std::time(nullptr))
                                     : flow->ts;
        if (opts.gate) opts.gate->awaitTurn(opts.gateId, flow->ts);
        ResolveStats rstats;
        CorrelatedRecord rec = resolve(store, *flow, logicalTs, &rstats);
        ++stats.resolved;
        stats.bytesTotal += rec.flow.bytes;
        stats.packetsTotal += rec.flow.packets;
        if (rec.correlated()) {
            ++stats.correlated;
            stats.bytesCorrelated += rec.flow.bytes;
        }
        if (opts.onResolved) opts.onResolved(rec, rstats);
        out.push(WriteItem{std::move(rec), logicalTs});
    }
    if (opts.gate) opts.gate->markDone(opts.gateId);
    return stats;
}

}  // namespace flowname
