#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

namespace flowname {

// Bounded MPMC FIFO shared by stream producers and worker pools.
//
// Two enqueue flavors model the two stream modes: tryPush drops the item and
// counts it when the queue is full (live streams cannot backpressure their
// source), push blocks until space is available (file replay can).
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity ? capacity : 1) {}

    BoundedQueue(const BoundedQueue&) = delete;
    BoundedQueue& operator=(const BoundedQueue&) = delete;

    // Returns false and bumps the drop counter when full or closed.
    bool tryPush(T item) {
        {
            std::unique_lock lock(mu_);
            if (!closed_ && items_.size() < capacity_) {
                items_.push_back(std::move(item));
                lock.unlock();
                notEmpty_.notify_one();
                return true;
            }
        }
        drops_.fetch_add(1, std::memory_order_relaxed);
        return false;
    }

    // Blocks while full. Returns false only when the queue was closed.
    bool push(T item) {
        std::unique_lock lock(mu_);
        notFull_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        if (closed_) return false;
        items_.push_back(std::move(item));
        lock.unlock();
        notEmpty_.notify_one();
        return true;
    }

    // Blocks while empty; nullopt once closed and drained.
    std::optional<T> pop() {
        std::unique_lock lock(mu_);
        notEmpty_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        lock.unlock();
        notFull_.notify_one();
        return item;
    }

    std::optional<T> tryPop() {
        std::unique_lock lock(mu_);
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        lock.unlock();
        notFull_.notify_one();
        return item;
    }

    // No further pushes succeed; consumers drain what is left.
    void close() {
        {
            std::lock_guard lock(mu_);
            closed_ = true;
        }
        notEmpty_.notify_all();
        notFull_.notify_all();
    }

    bool closed() const {
        std::lock_guard lock(mu_);
        return closed_;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return items_.size();
    }

    std::size_t capacity() const { return capacity_; }
    std::uint64_t drops() const { return drops_.load(std::memory_order_relaxed); }

private:
    const std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable notEmpty_;
    std::condition_variable notFull_;
    std::deque<T> items_;
    bool closed_ = false;
    std::atomic<std::uint64_t> drops_{0};
};

}  // namespace flowname
