#include "flowname/store.hpp"

#include <algorithm>

namespace flowname {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::size_t label(std::string_view key, std::size_t numSplit) {
    if (numSplit <= 1) return 0;
    return static_cast<std::size_t>(fnv1a64(key) % numSplit);
}

MapFamily::MapFamily(std::string name, int numSplit, std::int64_t clearUpInterval,
                     std::optional<std::int64_t> longClearUpInterval, Variant variant)
    : name_(std::move(name)),
      clearUpInterval_(clearUpInterval),
      longClearUpInterval_(longClearUpInterval),
      variant_(variant) {
    shards_.reserve(static_cast<std::size_t>(std::max(numSplit, 1)));
    for (int i = 0; i < std::max(numSplit, 1); ++i) {
        shards_.push_back(std::make_unique<Shard>());
    }
}

void MapFamily::initClockOnce(std::int64_t ts) {
    std::int64_t expected = kUnsetTs;
    lastClearUpTs_.compare_exchange_strong(expected, ts, std::memory_order_acq_rel);
    expected = kUnsetTs;
    lastLongClearTs_.compare_exchange_strong(expected, ts, std::memory_order_acq_rel);
    expected = kUnsetTs;
    lastSweepTs_.compare_exchange_strong(expected, ts, std::memory_order_acq_rel);
}

void MapFamily::maybeRotate(std::int64_t ts) {
    std::int64_t last = lastClearUpTs_.load(std::memory_order_acquire);
    if (last == kUnsetTs || ts - last < clearUpInterval_) return;
    std::lock_guard guard(rotateMu_);
    last = lastClearUpTs_.load(std::memory_order_acquire);
    if (last == kUnsetTs || ts - last < clearUpInterval_) return;  // someone else rotated
    rotate(ts);
}

void MapFamily::rotate(std::int64_t nowTs) {
    if (variant_ == Variant::NoClearUp || variant_ == Variant::ExactTtl) return;

    counters_.rotations.fetch_add(1, std::memory_order_relaxed);
    std::uint64_t movedToInactive = 0;
    for (auto& shard : shards_) {
        std::unique_lock lock(shard->mu);
        if (variant_ == Variant::NoRotation) {
            shard->active.clear();
        } else {
            shard->inactive = std::move(shard->active);
            shard->active.clear();
            movedToInactive += shard->inactive.size();
        }
    }
    if (variant_ == Variant::NoRotation) {
        inactiveCount_.store(0, std::memory_order_relaxed);
    } else {
        inactiveCount_.store(movedToInactive, std::memory_order_relaxed);
    }
    activeCount_.store(0, std::memory_order_relaxed);
    lastClearUpTs_.store(nowTs, std::memory_order_release);

    if (longClearUpInterval_) {
        std::int64_t lastLong = lastLongClearTs_.load(std::memory_order_acquire);
        if (lastLong != kUnsetTs && nowTs - lastLong >= *longClearUpInterval_) {
            for (auto& shard : shards_) {
                std::unique_lock lock(shard->mu);
                shard->longTier.clear();
            }
            longCount_.store(0, std::memory_order_relaxed);
            lastLongClearTs_.store(nowTs, std::memory_order_release);
            counters_.longClears.fetch_add(1, std::memory_order_relaxed);
        }
    }
}

void MapFamily::maybeSweep(std::int64_t ts) {
    const std::int64_t sweepInterval = std::max<std::int64_t>(1, clearUpInterval_ / 10);
    std::int64_t last = lastSweepTs_.load(std::memory_order_acquire);
    if (last == kUnsetTs || ts - last < sweepInterval) return;
    std::lock_guard guard(rotateMu_);
    last = lastSweepTs_.load(std::memory_order_acquire);
    if (last == kUnsetTs || ts - last < sweepInterval) return;
    sweepExpired(ts);
    lastSweepTs_.store(ts, std::memory_order_release);
}

void MapFamily::sweepExpired(std::int64_t nowTs) {
    std::uint64_t evicted = 0;
    for (auto& shard : shards_) {
        std::unique_lock lock(shard->mu);
        for (auto* tier : {&shard->active, &shard->inactive, &shard->longTier}) {
            for (auto it = tier->begin(); it != tier->end();) {
                if (it->second.expiry != kNoExpiry && it->second.expiry < nowTs) {
                    it = tier->erase(it);
                    ++evicted;
                } else {
                    ++it;
                }
            }
        }
    }
    if (evicted > 0) {
        counters_.expiredEvictions.fetch_add(evicted, std::memory_order_relaxed);
        // Recount from scratch; sweeps are rare and shard sizes small.
        std::uint64_t a = 0, i = 0, l = 0;
        for (auto& shard : shards_) {
            std::shared_lock lock(shard->mu);
            a += shard->active.size();
            i += shard->inactive.size();
            l += shard->longTier.size();
        }
        activeCount_.store(a, std::memory_order_relaxed);
        inactiveCount_.store(i, std::memory_order_relaxed);
        longCount_.store(l, std::memory_order_relaxed);
    }
}

void MapFamily::insert(const std::string& key, const std::string& value,
                       std::int64_t ts, std::int64_t ttl) {
    initClockOnce(ts);
    if (variant_ == Variant::ExactTtl) {
        maybeSweep(ts);
    } else if (variant_ != Variant::NoClearUp) {
        maybeRotate(ts);
    }

    // ExactTtl keeps one flat tier with per-entry expiry: tier routing only
    // exists to protect long-lived records from rotation, which ExactTtl
    // replaces with exact per-record expiry.
    bool toLong = false;
    std::int64_t expiry = kNoExpiry;
    if (variant_ == Variant::ExactTtl) {
        expiry = ts + ttl;
    } else if (variant_ != Variant::NoLongMaps) {
        toLong = ttl > clearUpInterval_;
    }

    Shard& shard = *shards_[label(key, shards_.size())];
    {
        std::unique_lock lock(shard.mu);
        auto& tier = toLong ? shard.longTier : shard.active;
        auto [it, inserted] = tier.insert_or_assign(key, Entry{value, expiry});
        if (inserted) {
            (toLong ? longCount_ : activeCount_).fetch_add(1, std::memory_order_relaxed);
        }
    }
    (toLong ? counters_.insertsLong : counters_.insertsActive)
        .fetch_add(1, std::memory_order_relaxed);
}

void MapFamily::insertActive(const std::string& key, const std::string& value,
                             std::int64_t expiry) {
    Shard& shard = *shards_[label(key, shards_.size())];
    {
        std::unique_lock lock(shard.mu);
        auto [it, inserted] = shard.active.insert_or_assign(key, Entry{value, expiry});
        if (inserted) activeCount_.fetch_add(1, std::memory_order_relaxed);
    }
    counters_.insertsActive.fetch_add(1, std::memory_order_relaxed);
}

void MapFamily::eraseIfExpired(Shard& shard, std::unordered_map<std::string, Entry> Shard::* tier,
                               const std::string& key, std::int64_t nowTs) {
    std::unique_lock lock(shard.mu);
    auto& map = shard.*tier;
    auto it = map.find(key);
    if (it == map.end() || it->second.expiry == kNoExpiry || it->second.expiry >= nowTs) return;
    map.erase(it);
    counters_.expiredEvictions.fetch_add(1, std::memory_order_relaxed);
    auto& count = tier == &Shard::active   ? activeCount_
                : tier == &Shard::inactive ? inactiveCount_
                                           : longCount_;
    count.fetch_sub(1, std::memory_order_relaxed);
}

std::optional<MapFamily::Entry> MapFamily::deepLookUpEntry(const std::string& key,
                                                           std::int64_t nowTs) {
    counters_.lookups.fetch_add(1, std::memory_order_relaxed);
    Shard& shard = *shards_[label(key, shards_.size())];

    struct TierRef {
        std::unordered_map<std::string, Entry> Shard::* map;
        std::atomic<std::uint64_t> FamilyCounters::* hits;
    };
    static constexpr TierRef kTiers[] = {
        {&Shard::active, &FamilyCounters::hitsActive},
        {&Shard::inactive, &FamilyCounters::hitsInactive},
        {&Shard::longTier, &FamilyCounters::hitsLong},
    };

    for (const auto& tier : kTiers) {
        bool expired = false;
        {
            std::shared_lock lock(shard.mu);
            const auto& map = shard.*tier.map;
            auto it = map.find(key);
            if (it != map.end()) {
                if (it->second.expiry != kNoExpiry && it->second.expiry < nowTs) {
                    expired = true;  // stale ExactTtl entry: treat as absent
                } else {
                    (counters_.*tier.hits).fetch_add(1, std::memory_order_relaxed);
                    return it->second;
                }
            }
        }
        if (expired) eraseIfExpired(shard, tier.map, key, nowTs);
    }
    counters_.misses.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
}

std::optional<std::string> MapFamily::deepLookUp(const std::string& key, std::int64_t nowTs) {
    if (auto entry = deepLookUpEntry(key, nowTs)) return std::move(entry->value);
    return std::nullopt;
}

std::uint64_t MapFamily::entryCount(Tier tier) const {
    switch (tier) {
        case Tier::Active: return activeCount_.load(std::memory_order_relaxed);
        case Tier::Inactive: return inactiveCount_.load(std::memory_order_relaxed);
        case Tier::Long: return longCount_.load(std::memory_order_relaxed);
    }
    return 0;
}

std::uint64_t MapFamily::entryCount() const {
    return entryCount(Tier::Active) + entryCount(Tier::Inactive) + entryCount(Tier::Long);
}

std::unordered_map<std::string, std::string> MapFamily::tierContents(Tier tier,
                                                                     std::size_t shard) const {
    std::unordered_map<std::string, std::string> out;
    const Shard& s = *shards_.at(shard);
    std::shared_lock lock(s.mu);
    const auto& map = tier == Tier::Active ? s.active : tier == Tier::Inactive ? s.inactive : s.longTier;
    for (const auto& [k, v] : map) out.emplace(k, v.value);
    return out;
}

std::vector<std::tuple<std::string, std::string, Tier>> MapFamily::allEntries() const {
    std::vector<std::tuple<std::string, std::string, Tier>> out;
    for (const auto& shard : shards_) {
        std::shared_lock lock(shard->mu);
        for (const auto& [k, v] : shard->active) out.emplace_back(k, v.value, Tier::Active);
        for (const auto& [k, v] : shard->inactive) out.emplace_back(k, v.value, Tier::Inactive);
        for (const auto& [k, v] : shard->longTier) out.emplace_back(k, v.value, Tier::Long);
    }
    return out;
}

FamilyCountersSnapshot MapFamily::countersSnapshot() const {
    FamilyCountersSnapshot s;
    s.insertsActive = counters_.insertsActive.load();
    s.insertsLong = counters_.insertsLong.load();
    s.lookups = counters_.lookups.load();
    s.hitsActive = counters_.hitsActive.load();
    s.hitsInactive = counters_.hitsInactive.load();
    s.hitsLong = counters_.hitsLong.load();
    s.misses = counters_.misses.load();
    s.rotations = counters_.rotations.load();
    s.longClears = counters_.longClears.load();
    s.expiredEvictions = counters_.expiredEvictions.load();
    return s;
}

MapStore::MapStore(const EngineConfig& config)
    : config_(config.normalized()),
      ipName_("ip-name", config_.numSplit, config_.aClearUpInterval,
              config_.longClearUpInterval, config_.variant),
      nameCname_("name-cname", config_.numSplit, config_.cClearUpInterval,
                 config_.longClearUpInterval, config_.variant) {}

void MapStore::fill(const DnsRecord& rec) {
    switch (rec.rtype) {
        case RType::A:
        case RType::AAAA:
            ipName_.insert(rec.answer, rec.qname, rec.ts, rec.ttl);
            break;
        case RType::CNAME:
            nameCname_.insert(rec.answer, rec.qname, rec.ts, rec.ttl);
            break;
        case RType::Other:
            othersDropped_.fetch_add(1, std::memory_order_relaxed);
            return;
    }
    fills_.fetch_add(1, std::memory_order_relaxed);
    notePeak();
}

void MapStore::memoizeChain(const std::string& firstName, const std::string& finalResult,
                            std::int64_t expiry) {
    nameCname_.insertActive(firstName, finalResult, expiry);
    memoizations_.fetch_add(1, std::memory_order_relaxed);
    notePeak();
}

std::uint64_t MapStore::totalEntries() const {
    return ipName_.entryCount() + nameCname_.entryCount();
}

void MapStore::notePeak() {
    std::uint64_t total = totalEntries();
    std::uint64_t peak = peakEntries_.load(std::memory_order_relaxed);
    while (total > peak &&
           !peakEntries_.compare_exchange_weak(peak, total, std::memory_order_relaxed)) {
    }
}

}  // namespace flowname
