#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "flowname/model.hpp"
#include "flowname/parse.hpp"
#include "flowname/queue.hpp"
#include "flowname/replay.hpp"
#include "flowname/store.hpp"

namespace flowname {

using LookUpQueue = BoundedQueue<FlowRecord>;

// One flow per line:
// ts \t srcIP \t dstIP \t proto \t srcPort \t dstPort \t packets \t bytes
Parsed<FlowRecord> parseFlowLine(std::string_view line, std::size_t lineNo = 0);
std::string formatFlowLine(const FlowRecord& rec);

struct ResolveStats {
    int cnameHits = 0;       // successful NAME->CNAME hops
    bool ipNameHit = false;
    bool memoized = false;
    bool truncated = false;  // walk stopped at the chain limit
};

// Alg: IP->NAME lookup, then a bounded reverse CNAME walk. Chains resolved
// with two or more hops are memoized as a direct head->result mapping, except
// walks cut off at the limit (their tail is unknown, so the shortcut could
// change later results).
CorrelatedRecord resolve(MapStore& store, const FlowRecord& flow, std::int64_t nowTs,
                         ResolveStats* stats = nullptr);

// A resolved flow plus the logical time it was resolved at (record time in
// replay, arrival wall clock live); the writer rolls files by this clock.
struct WriteItem {
    CorrelatedRecord record;
    std::int64_t logicalTs = 0;
};

using WriteQueue = BoundedQueue<WriteItem>;

struct LookUpWorkerStats {
    std::uint64_t resolved = 0;
    std::uint64_t correlated = 0;
    std::uint64_t bytesTotal = 0;
    std::uint64_t bytesCorrelated = 0;
    std::uint64_t packetsTotal = 0;
};

struct LookUpWorkerOptions {
    ReplayGate* gate = nullptr;
    int gateId = -1;
    bool useWallClock = false;  // live mode: roll/expiry clock is arrival time
    std::function<void(const CorrelatedRecord&, const ResolveStats&)> onResolved;
};

// Drains flows, resolves each one, and forwards the result. Every dequeued
// flow yields exactly one output record; the write queue push is blocking, so
// nothing is lost past this point.
LookUpWorkerStats lookUpWorker(LookUpQueue& queue, MapStore& store, WriteQueue& out,
                               const LookUpWorkerOptions& opts = {});

}  // namespace flowname
