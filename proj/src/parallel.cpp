#include "nncdf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace nncdf {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n) {
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : hw;
    }
    g_threads.store(n, std::memory_order_relaxed);
}

unsigned thread_count() {
    return g_threads.load(std::memory_order_relaxed);
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
    if (begin >= end) return;
    const std::size_t n = end - begin;
    unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    // Dynamic scheduling over single indices: assignment of index -> thread
    // varies, but fn writes only to per-index slots, so output does not.
    std::atomic<std::size_t> next{begin};
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= end) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

double pairwise_sum(const double* values, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = values[0];
        for (std::size_t i = 1; i < n; ++i) s += values[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

double pairwise_sum(const std::vector<double>& values) {
    return pairwise_sum(values.data(), values.size());
}

} // namespace nncdf
