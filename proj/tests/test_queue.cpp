#include <doctest.h>

#include <algorithm>
#include <thread>
#include <vector>

#include "flowname/queue.hpp"

using namespace flowname;

TEST_SUITE_BEGIN("queue");

TEST_CASE("tryPush on a full queue counts and discards") {
    BoundedQueue<int> q(10);
    int accepted = 0;
    for (int i = 0; i < 1000; ++i) {
        if (q.tryPush(i)) ++accepted;
    }
    CHECK(accepted == 10);
    CHECK(q.drops() == 990);
    CHECK(q.size() == 10);
}

TEST_CASE("FIFO order for a single producer") {
    BoundedQueue<int> q(100);
    for (int i = 0; i < 50; ++i) q.tryPush(i);
    q.close();
    int expected = 0;
    while (auto v = q.pop()) CHECK(*v == expected++);
    CHECK(expected == 50);
}

TEST_CASE("pop returns nullopt once closed and drained") {
    BoundedQueue<int> q(4);
    q.tryPush(1);
    q.close();
    CHECK(q.tryPush(2) == false);
    CHECK(q.drops() == 1);
    CHECK(q.pop() == 1);
    CHECK_FALSE(q.pop().has_value());
}

TEST_CASE("blocking push resumes when space frees up") {
    BoundedQueue<int> q(1);
    REQUIRE(q.push(0));
    std::thread producer([&] {
        for (int i = 1; i <= 5; ++i) q.push(i);
        q.close();
    });
    std::vector<int> got;
    while (auto v = q.pop()) got.push_back(*v);
    producer.join();
    CHECK(got == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(q.drops() == 0);
}

TEST_CASE("MPMC: every pushed item is consumed exactly once") {
    BoundedQueue<int> q(64);
    constexpr int kProducers = 4;
    constexpr int kPerProducer = 2500;

    std::vector<std::thread> producers;
    for (int p = 0; p < kProducers; ++p) {
        producers.emplace_back([&, p] {
            for (int i = 0; i < kPerProducer; ++i) q.push(p * kPerProducer + i);
        });
    }

    std::mutex mu;
    std::vector<int> got;
    std::vector<std::thread> consumers;
    for (int c = 0; c < 3; ++c) {
        consumers.emplace_back([&] {
            while (auto v = q.pop()) {
                std::lock_guard lock(mu);
                got.push_back(*v);
            }
        });
    }

    for (auto& t : producers) t.join();
    q.close();
    for (auto& t : consumers) t.join();

    REQUIRE(got.size() == kProducers * kPerProducer);
    std::sort(got.begin(), got.end());
    for (int i = 0; i < kProducers * kPerProducer; ++i) CHECK(got[static_cast<size_t>(i)] == i);
}

TEST_SUITE_END();
