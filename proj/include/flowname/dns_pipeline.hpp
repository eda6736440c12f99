#pragma once

#include <atomic>
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

using FillUpQueue = BoundedQueue<DnsRecord>;

// One DNS answer per line: ts \t rtype \t qname \t ttl \t answer
// Names are lowercase-folded and stripped of trailing dots here. Record
// types other than A/AAAA/CNAME parse as OTHER and are left to the filter.
Parsed<DnsRecord> parseDnsLine(std::string_view line, std::size_t lineNo = 0);
std::string formatDnsLine(const DnsRecord& rec);

// Keeps only usable responses: A/AAAA with an address answer of the matching
// family, or CNAME with a non-empty name answer.
bool filterValidResponse(const DnsRecord& rec);

struct FillWorkerStats {
    std::uint64_t filled = 0;
};

struct FillWorkerOptions {
    ReplayGate* gate = nullptr;  // file replay: wait for the timestamp turn
    int gateId = -1;
    std::function<void(const DnsRecord&)> onFilled;  // metrics sampling hook
};

// Drains the queue into the store until the queue closes.
FillWorkerStats fillUpWorker(FillUpQueue& queue, MapStore& store,
                             const FillWorkerOptions& opts = {});

}  // namespace flowname
