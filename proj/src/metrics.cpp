#include "flowname/metrics.hpp"

namespace flowname {

namespace {

void writeStream(std::ostream& os, const std::string& prefix, const StreamReport& s) {
    os << prefix << ".source=" << s.name << '\n';
    os << prefix << ".lines_read=" << s.linesRead << '\n';
    os << prefix << ".buffer_drops=" << s.bufferDrops << '\n';
    os << prefix << ".parse_ok=" << s.parseOk << '\n';
    os << prefix << ".parse_errors=" << s.parseErrors << '\n';
    os << prefix << ".filtered_out=" << s.filteredOut << '\n';
    os << prefix << ".enqueued=" << s.enqueued << '\n';
    os << prefix << ".queue_drops=" << s.queueDrops << '\n';
    if (s.failed) os << prefix << ".error=" << s.error << '\n';
}

void writeFamily(std::ostream& os, const std::string& prefix, const FamilyCountersSnapshot& f) {
    os << prefix << ".inserts_active=" << f.insertsActive << '\n';
    os << prefix << ".inserts_long=" << f.insertsLong << '\n';
    os << prefix << ".lookups=" << f.lookups << '\n';
    os << prefix << ".hits_active=" << f.hitsActive << '\n';
    os << prefix << ".hits_inactive=" << f.hitsInactive << '\n';
    os << prefix << ".hits_long=" << f.hitsLong << '\n';
    os << prefix << ".misses=" << f.misses << '\n';
    os << prefix << ".rotations=" << f.rotations << '\n';
    os << prefix << ".long_clears=" << f.longClears << '\n';
    os << prefix << ".expired_evictions=" << f.expiredEvictions << '\n';
}

}  // namespace

std::uint64_t RunReport::totalQueueDrops() const {
    std::uint64_t n = 0;
    for (const auto& s : dnsStreams) n += s.queueDrops;
    for (const auto& s : flowStreams) n += s.queueDrops;
    return n;
}

std::uint64_t RunReport::totalBufferDrops() const {
    std::uint64_t n = 0;
    for (const auto& s : dnsStreams) n += s.bufferDrops;
    for (const auto& s : flowStreams) n += s.bufferDrops;
    return n;
}

void RunReport::writeKeyValues(std::ostream& os) const {
    for (std::size_t i = 0; i < dnsStreams.size(); ++i) {
        writeStream(os, "dns[" + std::to_string(i) + "]", dnsStreams[i]);
    }
    for (std::size_t i = 0; i < flowStreams.size(); ++i) {
        writeStream(os, "flows[" + std::to_string(i) + "]", flowStreams[i]);
    }
    os << "records_filled=" << recordsFilled << '\n';
    os << "others_dropped=" << othersDropped << '\n';
    os << "flows_resolved=" << flowsResolved << '\n';
    os << "flows_correlated=" << flowsCorrelated << '\n';
    os << "records_written=" << recordsWritten << '\n';
    os << "bytes_total=" << bytesTotal << '\n';
    os << "bytes_correlated=" << bytesCorrelated << '\n';
    os << "packets_total=" << packetsTotal << '\n';
    writeFamily(os, "ip_name", ipName);
    writeFamily(os, "name_cname", nameCname);
    os << "memoizations=" << memoizations << '\n';
    os << "peak_entries=" << peakEntries << '\n';
    os << "final_entries=" << finalEntries << '\n';
    os << "max_write_delay=" << maxWriteDelay << '\n';
    os << "wall_seconds=" << wallSeconds << '\n';
    if (!fatalError.empty()) os << "fatal_error=" << fatalError << '\n';
    os << "correlation_rate=" << correlationRate() << '\n';
    for (std::size_t i = 0; i < chainLengthHist.size(); ++i) {
        os << "chain_length[" << i << "]=" << chainLengthHist[i] << '\n';
    }
}

}  // namespace flowname
