#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace msk {

/// Fixed-size pool dispatching index-range chunks. Work is partitioned into
/// fixed-size chunks independent of the worker count, so any reduction done
/// in chunk order is reproducible regardless of scheduling.
class ThreadPool {
public:
    explicit ThreadPool(int workers);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int workers() const { return static_cast<int>(threads_.size()); }

    /// Runs fn(begin, end, chunk_index) over [0, n) in chunks of chunk_size.
    /// Blocks until all chunks complete. fn must not throw.
    void parallel_chunks(int n, int chunk_size,
                         const std::function<void(int, int, int)>& fn);

    /// Global pool sized from hardware_concurrency (override with the
    /// MSK_THREADS environment variable).
    static ThreadPool& global();

private:
    void worker_loop();

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_task_, cv_done_;
    const std::function<void(int, int, int)>* fn_ = nullptr;
    int n_ = 0, chunk_size_ = 0, next_chunk_ = 0, pending_ = 0;
    bool stop_ = false;
};

}  // namespace msk
