#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "flowname/flow_pipeline.hpp"
#include "flowname/model.hpp"
#include "flowname/parse.hpp"
#include "flowname/queue.hpp"

namespace flowname {

enum class SourceOrigin { File, Stdin, Tcp };

// CLI source syntax: a path, "-" for stdin, or "tcp:PORT" for a listener.
struct SourceSpec {
    SourceOrigin origin = SourceOrigin::File;
    std::string path;
    int port = 0;

    static Parsed<SourceSpec> parse(std::string_view text);
    std::string describe() const;
    bool live() const { return origin == SourceOrigin::Tcp; }
};

// One input stream feeding raw lines through a bounded internal buffer.
//
// File and stdin replay apply backpressure (the reader blocks while the
// buffer is full), so replay never drops. TCP cannot slow its sender down:
// lines arriving on a full buffer are counted in bufferDrops and discarded.
class StreamSource {
public:
    StreamSource(SourceSpec spec, std::size_t bufferCapacity);
    ~StreamSource();

    StreamSource(const StreamSource&) = delete;
    StreamSource& operator=(const StreamSource&) = delete;

    // Opens the origin and starts the reader thread. Throws std::runtime_error
    // when the source cannot be opened.
    void start();

    // Next line in arrival order; nullopt at end of stream.
    std::optional<std::string> nextLine();

    // Live shutdown: stop accepting/reading and close the buffer.
    void stop();

    std::uint64_t linesRead() const { return linesRead_.load(std::memory_order_relaxed); }
    std::uint64_t bufferDrops() const { return buffer_.drops(); }
    bool failed() const { return failed_.load(std::memory_order_acquire); }
    std::string errorMessage() const;
    int boundPort() const { return boundPort_.load(std::memory_order_acquire); }
    const SourceSpec& spec() const { return spec_; }

private:
    void readFileLoop(std::istream& in);
    void tcpListenLoop();
    void serveConnection(int fd);
    bool deliverLine(std::string line);
    void fail(const std::string& message);

    SourceSpec spec_;
    BoundedQueue<std::string> buffer_;
    std::thread reader_;
    std::ifstream file_;
    std::atomic<bool> stop_{false};
    std::atomic<bool> failed_{false};
    std::atomic<std::uint64_t> linesRead_{0};
    std::atomic<int> boundPort_{0};
    int listenFd_ = -1;
    mutable std::mutex errMu_;
    std::string errorMessage_;
};

// Output line: ts \t srcIP \t dstIP \t bytes \t packets \t result \t chain
// with chain ';'-joined and result empty for uncorrelated flows.
std::string formatOutputLine(const CorrelatedRecord& rec);
Parsed<CorrelatedRecord> parseOutputLine(std::string_view line, std::size_t lineNo = 0);

// Append-only correlated output, one file per roll window of logical time,
// named correlated-<windowStart>.tsv (worker-suffixed when several write
// workers share a directory). Flushes are batched: every flushBatch records
// or whenever the logical clock advances by flushInterval.
class OutputSink {
public:
    struct Options {
        std::string directory;
        std::int64_t rollInterval = 3600;
        std::size_t flushBatch = 1000;
        std::int64_t flushInterval = 1;  // logical seconds
        int workerIndex = 0;
        bool workerSuffix = false;
    };

    explicit OutputSink(Options options);
    ~OutputSink();

    // Serializes and buffers one record. Throws std::runtime_error when the
    // sink cannot be written (treated as fatal by the engine).
    void append(const CorrelatedRecord& rec, std::int64_t logicalTs);
    void close();

    std::uint64_t written() const { return written_; }
    std::int64_t maxWriteDelay() const { return maxDelay_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    void flush();
    void openWindow(std::int64_t windowStart);

    Options options_;
    std::ofstream out_;
    std::int64_t currentWindow_ = std::numeric_limits<std::int64_t>::min();
    std::int64_t logicalNow_ = std::numeric_limits<std::int64_t>::min();
    std::int64_t lastFlushLogical_ = std::numeric_limits<std::int64_t>::min();
    std::int64_t oldestPending_ = std::numeric_limits<std::int64_t>::max();
    std::size_t pending_ = 0;
    std::uint64_t written_ = 0;
    std::int64_t maxDelay_ = 0;
    std::vector<std::string> files_;
    bool closed_ = false;
};

struct WriteWorkerStats {
    std::uint64_t written = 0;
};

// Drains the write queue into the sink until the queue closes; the writer
// never drops records.
WriteWorkerStats writeWorker(WriteQueue& queue, OutputSink& sink);

}  // namespace flowname
