#pragma once

#include <condition_variable>
#include <cstdint>
#include <limits>
#include <mutex>
#include <tuple>
#include <vector>

namespace flowname {

// Serializes store effects across sources during file replay so that a run is
// a deterministic merge of all inputs by record timestamp.
//
// Each consumer (one per source; inputs must be timestamp-sorted) announces
// the timestamp it is about to apply and proceeds once it holds the globally
// smallest pending key. Ties order DNS fills before flow lookups, then by
// source id, so a lookup at logical time T sees exactly the fills with ts <= T.
// Live (TCP) runs skip the gate entirely.
class ReplayGate {
public:
    static constexpr int kDnsPriority = 0;
    static constexpr int kFlowPriority = 1;

    // Registers a source; all sources must be registered before any awaitTurn.
    int registerSource(int kindPriority) {
        std::lock_guard lock(mu_);
        slots_.push_back(Slot{std::numeric_limits<std::int64_t>::min(), kindPriority, false});
        return static_cast<int>(slots_.size()) - 1;
    }

    // Publishes (ts) as this source's next effect and blocks until it is the
    // strict minimum of all pending keys. Also releases the previous effect.
    void awaitTurn(int id, std::int64_t ts) {
        std::unique_lock lock(mu_);
        slots_[static_cast<std::size_t>(id)].pendingTs = ts;
        cv_.notify_all();
        cv_.wait(lock, [&] { return isTurn(id); });
    }

    // Source exhausted; stops gating everyone else.
    void markDone(int id) {
        std::lock_guard lock(mu_);
        slots_[static_cast<std::size_t>(id)].done = true;
        cv_.notify_all();
    }

private:
    struct Slot {
        std::int64_t pendingTs;
        int priority;
        bool done;
    };

    bool isTurn(int id) const {
        const Slot& me = slots_[static_cast<std::size_t>(id)];
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (static_cast<int>(i) == id) continue;
            const Slot& other = slots_[i];
            if (other.done) continue;
            auto otherKey = std::tuple(other.pendingTs, other.priority, static_cast<int>(i));
            auto myKey = std::tuple(me.pendingTs, me.priority, id);
            if (otherKey < myKey) return false;
        }
        return true;
    }

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<Slot> slots_;
};

}  // namespace flowname
