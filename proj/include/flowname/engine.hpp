#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "flowname/io.hpp"
#include "flowname/metrics.hpp"
#include "flowname/model.hpp"
#include "flowname/store.hpp"

namespace flowname {

// Wires sources -> parse/filter -> queues -> fill/lookup workers -> writer.
//
// When every source is a file (or stdin) the engine runs in replay mode:
// enqueues block instead of dropping and store effects are serialized by
// record timestamp through a ReplayGate, making the run a deterministic merge
// of the inputs. Replay uses one fill/lookup consumer per source; configured
// worker counts apply to live (TCP) runs, where arrival wall-clock time is
// the logical clock and full buffers drop.
class Engine {
public:
    Engine(EngineConfig config, std::vector<SourceSpec> dnsSources,
           std::vector<SourceSpec> flowSources, std::string outDir);

    // Runs to completion (end of all replay streams, or requestStop in live
    // mode). Throws std::runtime_error on startup errors.
    RunReport run();

    // Safe to call from a signal-handler-driven thread.
    void requestStop();

    const MapStore& store() const { return *store_; }
    bool replayMode() const { return replayMode_; }

private:
    EngineConfig config_;
    std::vector<SourceSpec> dnsSources_;
    std::vector<SourceSpec> flowSources_;
    std::string outDir_;
    bool replayMode_ = false;
    std::unique_ptr<MapStore> store_;
    std::vector<StreamSource*> activeSources_;
    std::mutex activeMu_;
    std::atomic<bool> stopRequested_{false};
};

}  // namespace flowname
