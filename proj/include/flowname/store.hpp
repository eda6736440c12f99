#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "flowname/model.hpp"

namespace flowname {

// Stable non-cryptographic hash used for shard labels; deterministic across
// runs, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes);

// Shard label in [0, numSplit). Applied to fill-side answer keys and
// lookup-side flow addresses alike.
std::size_t label(std::string_view key, std::size_t numSplit);

enum class Tier { Active, Inactive, Long };

// Per-family counters. All atomics so fill and lookup workers can bump them
// without coordination; snapshots are only taken after runs quiesce.
struct FamilyCounters {
    std::atomic<std::uint64_t> insertsActive{0};
    std::atomic<std::uint64_t> insertsLong{0};
    std::atomic<std::uint64_t> lookups{0};
    std::atomic<std::uint64_t> hitsActive{0};
    std::atomic<std::uint64_t> hitsInactive{0};
    std::atomic<std::uint64_t> hitsLong{0};
    std::atomic<std::uint64_t> misses{0};
    std::atomic<std::uint64_t> rotations{0};
    std::atomic<std::uint64_t> longClears{0};
    std::atomic<std::uint64_t> expiredEvictions{0};
};

struct FamilyCountersSnapshot {
    std::uint64_t insertsActive = 0;
    std::uint64_t insertsLong = 0;
    std::uint64_t lookups = 0;
    std::uint64_t hitsActive = 0;
    std::uint64_t hitsInactive = 0;
    std::uint64_t hitsLong = 0;
    std::uint64_t misses = 0;
    std::uint64_t rotations = 0;
    std::uint64_t longClears = 0;
    std::uint64_t expiredEvictions = 0;

    std::uint64_t hits() const { return hitsActive + hitsInactive + hitsLong; }
};

// One key family (IP->NAME or NAME->CNAME): numSplit shards, each holding an
// active/inactive/long tier. Rotation snapshots active into inactive and
// clears active; records with ttl above the clear-up interval go to long.
class MapFamily {
public:
    struct Entry {
        std::string value;
        std::int64_t expiry = kNoExpiry;  // only used by the ExactTtl variant
    };
    static constexpr std::int64_t kNoExpiry = -1;

    MapFamily(std::string name, int numSplit, std::int64_t clearUpInterval,
              std::optional<std::int64_t> longClearUpInterval, Variant variant);

    // Rotation check (driven by record timestamps), then keyed insert with
    // tier routing. Key is the record's answer side, value the query side.
    void insert(const std::string& key, const std::string& value,
                std::int64_t ts, std::int64_t ttl);

    // First hit in tier order active -> inactive -> long; ExactTtl entries
    // whose expiry has passed count as absent and are lazily evicted.
    std::optional<std::string> deepLookUp(const std::string& key, std::int64_t nowTs);
    std::optional<Entry> deepLookUpEntry(const std::string& key, std::int64_t nowTs);

    // Snapshot-and-clear per the variant. Public so tests can drive the
    // boundary directly; fill paths call it via insert.
    void rotate(std::int64_t nowTs);

    // Direct insert that bypasses the rotation check (chain memoization).
    void insertActive(const std::string& key, const std::string& value,
                      std::int64_t expiry = kNoExpiry);

    // Sweeps expired ExactTtl entries from every shard.
    void sweepExpired(std::int64_t nowTs);

    std::int64_t clearUpInterval() const { return clearUpInterval_; }
    std::int64_t lastClearUpTs() const { return lastClearUpTs_.load(std::memory_order_acquire); }
    int numSplit() const { return static_cast<int>(shards_.size()); }
    const std::string& name() const { return name_; }

    std::uint64_t entryCount(Tier tier) const;
    std::uint64_t entryCount() const;

    // Test/report introspection: copy of one shard tier.
    std::unordered_map<std::string, std::string> tierContents(Tier tier, std::size_t shard) const;
    // All (key, value, tier) triples across shards, for variant equivalence checks.
    std::vector<std::tuple<std::string, std::string, Tier>> allEntries() const;

    FamilyCounters& counters() { return counters_; }
    FamilyCountersSnapshot countersSnapshot() const;

private:
    struct Shard {
        mutable std::shared_mutex mu;
        std::unordered_map<std::string, Entry> active;
        std::unordered_map<std::string, Entry> inactive;
        std::unordered_map<std::string, Entry> longTier;
    };

    static constexpr std::int64_t kUnsetTs = std::numeric_limits<std::int64_t>::min();

    void maybeRotate(std::int64_t ts);
    void maybeSweep(std::int64_t ts);
    void initClockOnce(std::int64_t ts);
    void eraseIfExpired(Shard& shard, std::unordered_map<std::string, Entry> Shard::* tier,
                        const std::string& key, std::int64_t nowTs);

    std::string name_;
    std::int64_t clearUpInterval_;
    std::optional<std::int64_t> longClearUpInterval_;
    Variant variant_;
    std::vector<std::unique_ptr<Shard>> shards_;

    std::atomic<std::int64_t> lastClearUpTs_{kUnsetTs};
    std::atomic<std::int64_t> lastLongClearTs_{kUnsetTs};
    std::atomic<std::int64_t> lastSweepTs_{kUnsetTs};
    std::mutex rotateMu_;

    std::atomic<std::uint64_t> activeCount_{0};
    std::atomic<std::uint64_t> inactiveCount_{0};
    std::atomic<std::uint64_t> longCount_{0};

    FamilyCounters counters_;
};

// The shared two-family storage: IP->NAME for A/AAAA answers, NAME->CNAME for
// alias answers. Thread-safe for concurrent fills and lookups.
class MapStore {
public:
    explicit MapStore(const EngineConfig& config);

    // Applies one validated DNS response. OTHER records are counted and
    // dropped; A/AAAA go to ipName, CNAME to nameCname.
    void fill(const DnsRecord& rec);

    MapFamily& ipName() { return ipName_; }
    MapFamily& nameCname() { return nameCname_; }
    const MapFamily& ipName() const { return ipName_; }
    const MapFamily& nameCname() const { return nameCname_; }

    // Caches a multi-hop chain head -> final result as a direct mapping.
    void memoizeChain(const std::string& firstName, const std::string& finalResult,
                      std::int64_t expiry = MapFamily::kNoExpiry);

    const EngineConfig& config() const { return config_; }

    std::uint64_t totalEntries() const;
    std::uint64_t peakEntries() const { return peakEntries_.load(std::memory_order_relaxed); }
    // Called by fill/insert paths; also callable externally for exact series.
    void notePeak();

    std::uint64_t memoizations() const { return memoizations_.load(std::memory_order_relaxed); }
    std::uint64_t othersDropped() const { return othersDropped_.load(std::memory_order_relaxed); }
    std::uint64_t fills() const { return fills_.load(std::memory_order_relaxed); }

private:
    EngineConfig config_;
    MapFamily ipName_;
    MapFamily nameCname_;
    std::atomic<std::uint64_t> memoizations_{0};
    std::atomic<std::uint64_t> othersDropped_{0};
    std::atomic<std::uint64_t> fills_{0};
    std::atomic<std::uint64_t> peakEntries_{0};
};

}  // namespace flowname
