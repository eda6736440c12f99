#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "flowname/store.hpp"

namespace flowname {

// Per-input-stream accounting. Every line read from a source ends up in
// exactly one of: parseErrors, filteredOut, queueDrops, or enqueued; lines
// that never reached the parser are in bufferDrops.
struct StreamReport {
    std::string name;
    std::uint64_t linesRead = 0;
    std::uint64_t bufferDrops = 0;
    std::uint64_t parseOk = 0;
    std::uint64_t parseErrors = 0;
    std::uint64_t filteredOut = 0;  // DNS only: not a usable response
    std::uint64_t enqueued = 0;
    std::uint64_t queueDrops = 0;
    bool failed = false;
    std::string error;
};

struct RunReport {
    std::vector<StreamReport> dnsStreams;
    std::vector<StreamReport> flowStreams;

    std::uint64_t recordsFilled = 0;
    std::uint64_t flowsResolved = 0;
    std::uint64_t flowsCorrelated = 0;
    std::uint64_t recordsWritten = 0;
    std::uint64_t bytesTotal = 0;
    std::uint64_t bytesCorrelated = 0;
    std::uint64_t packetsTotal = 0;

    FamilyCountersSnapshot ipName;
    FamilyCountersSnapshot nameCname;
    std::uint64_t memoizations = 0;
    std::uint64_t othersDropped = 0;

    std::uint64_t peakEntries = 0;
    std::uint64_t finalEntries = 0;
    // (logical second, total entries) samples taken on fill-side clock advances.
    std::vector<std::pair<std::int64_t, std::uint64_t>> entrySeries;

    // Index = resolved chain length (0 for uncorrelated flows).
    std::vector<std::uint64_t> chainLengthHist;

    std::int64_t maxWriteDelay = 0;
    double wallSeconds = 0.0;
    std::vector<std::string> outputFiles;
    std::string fatalError;  // non-empty when a write worker failed

    double correlationRate() const {
        return bytesTotal ? static_cast<double>(bytesCorrelated) / static_cast<double>(bytesTotal)
                          : 0.0;
    }

    std::uint64_t totalQueueDrops() const;
    std::uint64_t totalBufferDrops() const;

    // Flat key=value dump, one pair per line.
    void writeKeyValues(std::ostream& os) const;
};

}  // namespace flowname
