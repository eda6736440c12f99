#include "flowname/engine.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "flowname/dns_pipeline.hpp"
#include "flowname/flow_pipeline.hpp"
#include "flowname/replay.hpp"

namespace flowname {

namespace {

// Deterministic (gate-serialized in replay) sampler for the entry-count
// series: one sample whenever the fill-side logical clock advances.
class EntrySeriesSampler {
public:
    explicit EntrySeriesSampler(const MapStore& store) : store_(store) {}

    void observe(std::int64_t ts) {
        std::lock_guard lock(mu_);
        if (!series_.empty() && ts <= lastTs_) return;
        lastTs_ = ts;
        series_.emplace_back(ts, store_.totalEntries());
    }

    std::vector<std::pair<std::int64_t, std::uint64_t>> take() {
        std::lock_guard lock(mu_);
        return std::move(series_);
    }

private:
    const MapStore& store_;
    std::mutex mu_;
    std::int64_t lastTs_ = std::numeric_limits<std::int64_t>::min();
    std::vector<std::pair<std::int64_t, std::uint64_t>> series_;
};

struct ProducerCounters {
    std::uint64_t parseOk = 0;
    std::uint64_t parseErrors = 0;
    std::uint64_t filteredOut = 0;
    std::uint64_t enqueued = 0;
};

}  // namespace

Engine::Engine(EngineConfig config, std::vector<SourceSpec> dnsSources,
               std::vector<SourceSpec> flowSources, std::string outDir)
    : config_(config.normalized()),
      dnsSources_(std::move(dnsSources)),
      flowSources_(std::move(flowSources)),
      outDir_(std::move(outDir)) {
    replayMode_ = std::none_of(dnsSources_.begin(), dnsSources_.end(),
                               [](const SourceSpec& s) { return s.live(); }) &&
                  std::none_of(flowSources_.begin(), flowSources_.end(),
                               [](const SourceSpec& s) { return s.live(); });
}

void Engine::requestStop() {
    stopRequested_.store(true, std::memory_order_release);
    std::lock_guard lock(activeMu_);
    for (auto* src : activeSources_) src->stop();
}

RunReport Engine::run() {
    if (auto err = config_.validate()) throw std::runtime_error("config: " + *err);
    if (dnsSources_.empty() && flowSources_.empty()) {
        throw std::runtime_error("no input sources configured");
    }

    const auto wallStart = std::chrono::steady_clock::now();
    store_ = std::make_unique<MapStore>(config_);
    MapStore& store = *store_;

    RunReport report;
    report.dnsStreams.resize(dnsSources_.size());
    report.flowStreams.resize(flowSources_.size());
    report.chainLengthHist.assign(static_cast<std::size_t>(config_.chainLimit) + 2, 0);

    EntrySeriesSampler sampler(store);
    std::vector<std::atomic<std::uint64_t>> chainHist(report.chainLengthHist.size());
    for (auto& c : chainHist) c.store(0);

    ReplayGate gate;
    const bool gated = replayMode_;

    // Sources and queues. One fill/lookup queue per source.
    std::vector<std::unique_ptr<StreamSource>> dnsSrcs;
    std::vector<std::unique_ptr<StreamSource>> flowSrcs;
    std::vector<std::unique_ptr<FillUpQueue>> dnsQueues;
    std::vector<std::unique_ptr<LookUpQueue>> flowQueues;
    for (std::size_t i = 0; i < dnsSources_.size(); ++i) {
        dnsSrcs.push_back(std::make_unique<StreamSource>(dnsSources_[i], config_.queueCapacity));
        dnsQueues.push_back(std::make_unique<FillUpQueue>(config_.queueCapacity));
    }
    for (std::size_t i = 0; i < flowSources_.size(); ++i) {
        flowSrcs.push_back(std::make_unique<StreamSource>(flowSources_[i], config_.queueCapacity));
        flowQueues.push_back(std::make_unique<LookUpQueue>(config_.queueCapacity));
    }

    // Startup errors (unopenable sources) surface before any thread spawns.
    for (auto& src : dnsSrcs) src->start();
    for (auto& src : flowSrcs) src->start();
    {
        std::lock_guard lock(activeMu_);
        for (auto& src : dnsSrcs) activeSources_.push_back(src.get());
        for (auto& src : flowSrcs) activeSources_.push_back(src.get());
    }

    WriteQueue writeQueue(config_.queueCapacity);

    std::vector<ProducerCounters> dnsProd(dnsSources_.size());
    std::vector<ProducerCounters> flowProd(flowSources_.size());
    std::vector<std::thread> producers;
    producers.reserve(dnsSources_.size() + flowSources_.size());

    // DNS producers: read -> parse -> filter -> enqueue.
    for (std::size_t i = 0; i < dnsSrcs.size(); ++i) {
        producers.emplace_back([&, i] {
            StreamSource& src = *dnsSrcs[i];
            FillUpQueue& queue = *dnsQueues[i];
            ProducerCounters& c = dnsProd[i];
            const bool live = src.spec().live();
            std::size_t lineNo = 0;
            while (auto line = src.nextLine()) {
                ++lineNo;
                auto rec = parseDnsLine(*line, lineNo);
                if (!rec) {
                    ++c.parseErrors;
                    continue;
                }
                ++c.parseOk;
                if (!filterValidResponse(rec.value())) {
                    ++c.filteredOut;
                    continue;
                }
                if (live ? queue.tryPush(std::move(rec.value()))
                         : queue.push(std::move(rec.value()))) {
                    ++c.enqueued;
                }
            }
            queue.close();
        });
    }

    // Flow producers.
    for (std::size_t i = 0; i < flowSrcs.size(); ++i) {
        producers.emplace_back([&, i] {
            StreamSource& src = *flowSrcs[i];
            LookUpQueue& queue = *flowQueues[i];
            ProducerCounters& c = flowProd[i];
            const bool live = src.spec().live();
            std::size_t lineNo = 0;
            while (auto line = src.nextLine()) {
                ++lineNo;
                auto rec = parseFlowLine(*line, lineNo);
                if (!rec) {
                    ++c.parseErrors;
                    continue;
                }
                ++c.parseOk;
                if (live ? queue.tryPush(std::move(rec.value()))
                         : queue.push(std::move(rec.value()))) {
                    ++c.enqueued;
                }
            }
            queue.close();
        });
    }

    // Consumers. Replay pins one consumer per source so the gate's
    // "pending timestamp advanced => prior effects applied" holds.
    std::vector<std::thread> consumers;
    std::mutex statsMu;
    std::vector<FillWorkerStats> fillStats;
    std::vector<LookUpWorkerStats> lookupStats;

    FillWorkerOptions fillOptsBase;
    fillOptsBase.onFilled = [&](const DnsRecord& rec) { sampler.observe(rec.ts); };

    auto onResolved = [&](const CorrelatedRecord& rec, const ResolveStats&) {
        std::size_t len = std::min(rec.chain.size(), chainHist.size() - 1);
        chainHist[len].fetch_add(1, std::memory_order_relaxed);
    };

    // All gate slots must exist before any consumer runs, or early records
    // would skip waiting for not-yet-registered sources.
    struct FillPlan {
        std::size_t queue;
        FillWorkerOptions opts;
    };
    struct LookupPlan {
        std::size_t queue;
        LookUpWorkerOptions opts;
    };
    std::vector<FillPlan> fillPlans;
    std::vector<LookupPlan> lookupPlans;
    for (std::size_t i = 0; i < dnsQueues.size(); ++i) {
        const int workers = gated ? 1 : config_.fillWorkers;
        for (int w = 0; w < workers; ++w) {
            FillWorkerOptions opts = fillOptsBase;
            if (gated) {
                opts.gate = &gate;
                opts.gateId = gate.registerSource(ReplayGate::kDnsPriority);
            }
            fillPlans.push_back({i, std::move(opts)});
        }
    }
    for (std::size_t i = 0; i < flowQueues.size(); ++i) {
        const int workers = gated ? 1 : config_.lookupWorkers;
        for (int w = 0; w < workers; ++w) {
            LookUpWorkerOptions opts;
            opts.useWallClock = !replayMode_;
            opts.onResolved = onResolved;
            if (gated) {
                opts.gate = &gate;
                opts.gateId = gate.registerSource(ReplayGate::kFlowPriority);
            }
            lookupPlans.push_back({i, std::move(opts)});
        }
    }
    for (auto& plan : fillPlans) {
        consumers.emplace_back([&, plan] {
            auto stats = fillUpWorker(*dnsQueues[plan.queue], store, plan.opts);
            std::lock_guard lock(statsMu);
            fillStats.push_back(stats);
        });
    }
    for (auto& plan : lookupPlans) {
        consumers.emplace_back([&, plan] {
            auto stats = lookUpWorker(*flowQueues[plan.queue], store, writeQueue, plan.opts);
            std::lock_guard lock(statsMu);
            lookupStats.push_back(stats);
        });
    }

    // Write workers, each with its own rolling sink.
    std::vector<std::unique_ptr<OutputSink>> sinks;
    std::vector<std::thread> writers;
    for (int w = 0; w < config_.writeWorkers; ++w) {
        OutputSink::Options opts;
        opts.directory = outDir_;
        opts.rollInterval = config_.rollInterval;
        opts.workerIndex = w;
        opts.workerSuffix = config_.writeWorkers > 1;
        sinks.push_back(std::make_unique<OutputSink>(opts));
    }
    std::vector<WriteWorkerStats> writeStats(sinks.size());
    std::string writerError;
    std::mutex writerErrMu;
    for (std::size_t w = 0; w < sinks.size(); ++w) {
        writers.emplace_back([&, w] {
            try {
                writeStats[w] = writeWorker(writeQueue, *sinks[w]);
            } catch (const std::exception& e) {
                std::lock_guard lock(writerErrMu);
                if (writerError.empty()) writerError = e.what();
                requestStop();
                writeQueue.close();
            }
        });
    }

    for (auto& t : producers) t.join();
    for (auto& t : consumers) t.join();
    writeQueue.close();
    for (auto& t : writers) t.join();
    {
        std::lock_guard lock(activeMu_);
        activeSources_.clear();
    }

    // Collect.
    for (std::size_t i = 0; i < dnsSrcs.size(); ++i) {
        StreamReport& s = report.dnsStreams[i];
        s.name = dnsSources_[i].describe();
        s.linesRead = dnsSrcs[i]->linesRead();
        s.bufferDrops = dnsSrcs[i]->bufferDrops();
        s.parseOk = dnsProd[i].parseOk;
        s.parseErrors = dnsProd[i].parseErrors;
        s.filteredOut = dnsProd[i].filteredOut;
        s.enqueued = dnsProd[i].enqueued;
        s.queueDrops = dnsQueues[i]->drops();
        s.failed = dnsSrcs[i]->failed();
        s.error = dnsSrcs[i]->errorMessage();
    }
    for (std::size_t i = 0; i < flowSrcs.size(); ++i) {
        StreamReport& s = report.flowStreams[i];
        s.name = flowSources_[i].describe();
        s.linesRead = flowSrcs[i]->linesRead();
        s.bufferDrops = flowSrcs[i]->bufferDrops();
        s.parseOk = flowProd[i].parseOk;
        s.parseErrors = flowProd[i].parseErrors;
        s.enqueued = flowProd[i].enqueued;
        s.queueDrops = flowQueues[i]->drops();
        s.failed = flowSrcs[i]->failed();
        s.error = flowSrcs[i]->errorMessage();
    }
    for (const auto& fs : fillStats) report.recordsFilled += fs.filled;
    for (const auto& ls : lookupStats) {
        report.flowsResolved += ls.resolved;
        report.flowsCorrelated += ls.correlated;
        report.bytesTotal += ls.bytesTotal;
        report.bytesCorrelated += ls.bytesCorrelated;
        report.packetsTotal += ls.packetsTotal;
    }
    for (std::size_t w = 0; w < sinks.size(); ++w) {
        report.recordsWritten += writeStats[w].written;
        report.maxWriteDelay = std::max(report.maxWriteDelay, sinks[w]->maxWriteDelay());
        for (const auto& f : sinks[w]->files()) report.outputFiles.push_back(f);
    }
    report.ipName = store.ipName().countersSnapshot();
    report.nameCname = store.nameCname().countersSnapshot();
    report.memoizations = store.memoizations();
    report.othersDropped = store.othersDropped();
    report.peakEntries = store.peakEntries();
    report.finalEntries = store.totalEntries();
    report.entrySeries = sampler.take();
    for (std::size_t i = 0; i < chainHist.size(); ++i) {
        report.chainLengthHist[i] = chainHist[i].load();
    }
    report.wallSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wallStart).count();
    report.fatalError = writerError;
    return report;
}

}  // namespace flowname
