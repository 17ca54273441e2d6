#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace foresight {

/// Applies f to every item on a bounded pool; results (or captured exceptions)
/// come back in input order, so downstream processing stays deterministic.
template <typename In, typename F>
auto parallel_map(const std::vector<In>& items, F f, int workers)
    -> std::vector<std::pair<std::optional<decltype(f(items[0]))>, std::exception_ptr>> {
    using Out = decltype(f(items[0]));
    std::vector<std::pair<std::optional<Out>, std::exception_ptr>> results(items.size());
    if (items.empty()) return results;
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(items.size()));

    std::atomic<size_t> next{0};
    auto run = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= items.size()) break;
            try {
                results[i].first = f(items[i]);
            } catch (...) {
                results[i].second = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run();
        return results;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(run);
    for (auto& t : threads) t.join();
    return results;
}

/// Enforces a minimum interval between requests; shared across the threads of
/// one provider client.
class RateLimiter {
public:
    explicit RateLimiter(int min_interval_ms = 0) : min_interval_ms_(min_interval_ms) {}

    void acquire() {
        if (min_interval_ms_ <= 0) return;
        std::unique_lock lock(mu_);
        auto now = std::chrono::steady_clock::now();
        auto earliest = last_ + std::chrono::milliseconds(min_interval_ms_);
        if (now < earliest) {
            lock.unlock();
            std::this_thread::sleep_for(earliest - now);
            lock.lock();
        }
        last_ = std::chrono::steady_clock::now();
    }

private:
    int min_interval_ms_;
    std::mutex mu_;
    std::chrono::steady_clock::time_point last_{};
};

/// Runs op, retrying with exponential backoff. Rethrows the final failure.
template <typename Op>
auto with_retries(Op op, int retries, int backoff_ms = 100) -> decltype(op()) {
    for (int attempt = 0;; ++attempt) {
        try {
            return op();
        } catch (...) {
            if (attempt >= retries) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms << attempt));
        }
    }
}

}  // namespace foresight
