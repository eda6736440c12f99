#include "flowname/io.hpp"

#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <iostream>

namespace flowname {

Parsed<SourceSpec> SourceSpec::parse(std::string_view text) {
    if (text.empty()) return ParseError{0, "empty source spec"};
    SourceSpec spec;
    if (text == "-") {
        spec.origin = SourceOrigin::Stdin;
        return spec;
    }
    if (text.rfind("tcp:", 0) == 0) {
        auto port = parseIntInRange(text.substr(4), 0, 65535);
        if (!port) return ParseError{0, "bad tcp port in source spec"};
        spec.origin = SourceOrigin::Tcp;
        spec.port = *port;
        return spec;
    }
    spec.origin = SourceOrigin::File;
    spec.path = std::string(text);
    return spec;
}

std::string SourceSpec::describe() const {
    switch (origin) {
        case SourceOrigin::File: return path;
        case SourceOrigin::Stdin: return "<stdin>";
        case SourceOrigin::Tcp: return "tcp:" + std::to_string(port);
    }
    return "?";
}

StreamSource::StreamSource(SourceSpec spec, std::size_t bufferCapacity)
    : spec_(std::move(spec)), buffer_(bufferCapacity) {}

StreamSource::~StreamSource() {
    stop();
    if (reader_.joinable()) reader_.join();
}

void StreamSource::fail(const std::string& message) {
    {
        std::lock_guard lock(errMu_);
        errorMessage_ = message;
    }
    failed_.store(true, std::memory_order_release);
}

std::string StreamSource::errorMessage() const {
    std::lock_guard lock(errMu_);
    return errorMessage_;
}

void StreamSource::start() {
    switch (spec_.origin) {
        case SourceOrigin::File: {
            file_.open(spec_.path);
            if (!file_.is_open()) {
                throw std::runtime_error("cannot open input file: " + spec_.path);
            }
            reader_ = std::thread([this] { readFileLoop(file_); });
            break;
        }
        case SourceOrigin::Stdin:
            reader_ = std::thread([this] { readFileLoop(std::cin); });
            break;
        case SourceOrigin::Tcp: {
            listenFd_ = ::socket(AF_INET, SOCK_STREAM, 0);
            if (listenFd_ < 0) throw std::runtime_error("socket() failed");
            int one = 1;
            ::setsockopt(listenFd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
            sockaddr_in addr{};
            addr.sin_family = AF_INET;
            addr.sin_addr.s_addr = htonl(INADDR_ANY);
            addr.sin_port = htons(static_cast<std::uint16_t>(spec_.port));
            if (::bind(listenFd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
                ::listen(listenFd_, 4) != 0) {
                ::close(listenFd_);
                listenFd_ = -1;
                throw std::runtime_error("cannot listen on tcp:" + std::to_string(spec_.port));
            }
            sockaddr_in bound{};
            socklen_t len = sizeof(bound);
            ::getsockname(listenFd_, reinterpret_cast<sockaddr*>(&bound), &len);
            boundPort_.store(ntohs(bound.sin_port), std::memory_order_release);
            reader_ = std::thread([this] { tcpListenLoop(); });
            break;
        }
    }
}

bool StreamSource::deliverLine(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (spec_.live()) {
        if (!buffer_.tryPush(std::move(line))) return false;  // counted by the buffer
    } else {
        if (!buffer_.push(std::move(line))) return false;  // closed during shutdown
    }
    linesRead_.fetch_add(1, std::memory_order_relaxed);
    return true;
}

void StreamSource::readFileLoop(std::istream& in) {
    std::string line;
    while (!stop_.load(std::memory_order_relaxed) && std::getline(in, line)) {
        deliverLine(std::move(line));
        line.clear();
    }
    if (in.bad()) fail("read error on " + spec_.describe() + ": " + std::strerror(errno));
    buffer_.close();
}

void StreamSource::tcpListenLoop() {
    while (!stop_.load(std::memory_order_relaxed)) {
        pollfd pfd{listenFd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc < 0 && errno != EINTR) {
            fail("poll error on " + spec_.describe());
            break;
        }
        if (rc <= 0 || !(pfd.revents & POLLIN)) continue;
        int conn = ::accept(listenFd_, nullptr, nullptr);
        if (conn < 0) continue;
        serveConnection(conn);
        ::close(conn);
    }
    ::close(listenFd_);
    listenFd_ = -1;
    buffer_.close();
}

void StreamSource::serveConnection(int fd) {
    std::string partial;
    char chunk[65536];
    while (!stop_.load(std::memory_order_relaxed)) {
        pollfd pfd{fd, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc < 0 && errno != EINTR) {
            fail("poll error on " + spec_.describe());
            return;
        }
        if (rc <= 0 || !(pfd.revents & POLLIN)) continue;
        ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n == 0) return;  // peer closed
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("recv error on " + spec_.describe() + ": " + std::strerror(errno));
            return;
        }
        partial.append(chunk, static_cast<std::size_t>(n));
        std::size_t start = 0;
        while (true) {
            std::size_t nl = partial.find('\n', start);
            if (nl == std::string::npos) break;
            deliverLine(partial.substr(start, nl - start));
            start = nl + 1;
        }
        partial.erase(0, start);
    }
}

std::optional<std::string> StreamSource::nextLine() { return buffer_.pop(); }

void StreamSource::stop() {
    stop_.store(true, std::memory_order_relaxed);
    buffer_.close();
}

std::string formatOutputLine(const CorrelatedRecord& rec) {
    std::string out;
    out.reserve(96);
    out += std::to_string(rec.flow.ts);
    out += '\t';
    out += rec.flow.srcIp;
    out += '\t';
    out += rec.flow.dstIp;
    out += '\t';
    out += std::to_string(rec.flow.bytes);
    out += '\t';
    out += std::to_string(rec.flow.packets);
    out += '\t';
    if (rec.result) out += *rec.result;
    out += '\t';
    for (std::size_t i = 0; i < rec.chain.size(); ++i) {
        if (i > 0) out += ';';
        out += rec.chain[i];
    }
    return out;
}

Parsed<CorrelatedRecord> parseOutputLine(std::string_view line, std::size_t lineNo) {
    auto fields = splitFields(line);
    if (fields.size() != 7) {
        return ParseError{lineNo, "expected 7 tab-separated fields, got " +
                                      std::to_string(fields.size())};
    }
    auto ts = parseI64(fields[0]);
    if (!ts || *ts < 0) return ParseError{lineNo, "bad ts field"};
    if (fields[1].empty()) return ParseError{lineNo, "empty srcIP"};
    if (fields[2].empty()) return ParseError{lineNo, "empty dstIP"};
    auto bytes = parseU64(fields[3]);
    if (!bytes) return ParseError{lineNo, "bad bytes field"};
    auto packets = parseU64(fields[4]);
    if (!packets) return ParseError{lineNo, "bad packets field"};

    CorrelatedRecord rec;
    rec.flow.ts = *ts;
    rec.flow.srcIp = std::string(fields[1]);
    rec.flow.dstIp = std::string(fields[2]);
    rec.flow.bytes = *bytes;
    rec.flow.packets = *packets;
    if (!fields[6].empty()) {
        for (auto part : splitFields(fields[6], ';')) rec.chain.emplace_back(part);
    }
    if (!fields[5].empty()) {
        rec.result = std::string(fields[5]);
    }
    if (rec.chain.empty() != !rec.result.has_value() ||
        (rec.result && *rec.result != rec.chain.back())) {
        return ParseError{lineNo, "inconsistent result/chain fields"};
    }
    return rec;
}

OutputSink::OutputSink(Options options) : options_(std::move(options)) {
    std::filesystem::create_directories(options_.directory);
}

OutputSink::~OutputSink() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; close() explicitly to observe errors
    }
}

void OutputSink::openWindow(std::int64_t windowStart) {
    if (out_.is_open()) {
        flush();
        out_.close();
    }
    std::string name = "correlated-" + std::to_string(windowStart);
    if (options_.workerSuffix) name += ".w" + std::to_string(options_.workerIndex);
    name += ".tsv";
    std::filesystem::path path = std::filesystem::path(options_.directory) / name;
    bool known = std::find(files_.begin(), files_.end(), path.string()) != files_.end();
    out_.open(path, std::ios::app);
    if (!out_.is_open()) throw std::runtime_error("cannot open output file: " + path.string());
    if (!known) files_.push_back(path.string());
    currentWindow_ = windowStart;
}

void OutputSink::append(const CorrelatedRecord& rec, std::int64_t logicalTs) {
    if (closed_) throw std::runtime_error("append on closed sink");
    logicalNow_ = std::max(logicalNow_, logicalTs);
    std::int64_t window = logicalTs - (logicalTs % options_.rollInterval);
    if (window != currentWindow_) openWindow(window);

    out_ << formatOutputLine(rec) << '\n';
    if (!out_) throw std::runtime_error("write error on output sink");
    ++pending_;
    ++written_;
    oldestPending_ = std::min(oldestPending_, logicalTs);

    if (pending_ >= options_.flushBatch ||
        (lastFlushLogical_ != std::numeric_limits<std::int64_t>::min() &&
         logicalNow_ - lastFlushLogical_ >= options_.flushInterval)) {
        flush();
    }
    if (lastFlushLogical_ == std::numeric_limits<std::int64_t>::min()) {
        lastFlushLogical_ = logicalNow_;
    }
}

void OutputSink::flush() {
    if (pending_ == 0) {
        lastFlushLogical_ = logicalNow_;
        return;
    }
    out_.flush();
    if (!out_) throw std::runtime_error("flush error on output sink");
    if (oldestPending_ != std::numeric_limits<std::int64_t>::max()) {
        maxDelay_ = std::max(maxDelay_, logicalNow_ - oldestPending_);
    }
    pending_ = 0;
    oldestPending_ = std::numeric_limits<std::int64_t>::max();
    lastFlushLogical_ = logicalNow_;
}

void OutputSink::close() {
    if (closed_) return;
    if (out_.is_open()) {
        flush();
        out_.close();
    }
    closed_ = true;
}

WriteWorkerStats writeWorker(WriteQueue& queue, OutputSink& sink) {
    WriteWorkerStats stats;
    while (auto item = queue.pop()) {
        sink.append(item->record, item->logicalTs);
        ++stats.written;
    }
    sink.close();
    return stats;
}

}  // namespace flowname
