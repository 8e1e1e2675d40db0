#include "msk/thread_pool.hpp"

#include <cstdlib>

namespace msk {

ThreadPool::ThreadPool(int workers) {
    if (workers < 1) workers = 1;
    for (int i = 0; i < workers; ++i)
        threads_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        stop_ = true;
    }
    cv_task_.notify_all();
    for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop() {
    for (;;) {
        int begin, end, idx;
        const std::function<void(int, int, int)>* fn;
        {
            std::unique_lock<std::mutex> lock(mutex_);
            cv_task_.wait(lock, [this] { return stop_ || next_chunk_ < n_; });
            if (stop_ && next_chunk_ >= n_) return;
            begin = next_chunk_;
            end = std::min(begin + chunk_size_, n_);
            idx = begin / chunk_size_;
            next_chunk_ = end;
            fn = fn_;
        }
        (*fn)(begin, end, idx);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            pending_ -= end - begin;
            if (pending_ == 0) cv_done_.notify_all();
        }
    }
}

void ThreadPool::parallel_chunks(int n, int chunk_size,
                                 const std::function<void(int, int, int)>& fn) {
    if (n <= 0) return;
    if (chunk_size < 1) chunk_size = 1;
    if (workers() == 1 || n <= chunk_size) {
        for (int begin = 0, idx = 0; begin < n; begin += chunk_size, ++idx)
            fn(begin, std::min(begin + chunk_size, n), idx);
        return;
    }
    std::unique_lock<std::mutex> lock(mutex_);
    fn_ = &fn;
    n_ = n;
    chunk_size_ = chunk_size;
    next_chunk_ = 0;
    pending_ = n;
    cv_task_.notify_all();
    cv_done_.wait(lock, [this] { return pending_ == 0; });
    n_ = 0;
    fn_ = nullptr;
}

ThreadPool& ThreadPool::global() {
    static ThreadPool pool([] {
        if (const char* env = std::getenv("MSK_THREADS")) {
            const int n = std::atoi(env);
            if (n > 0) return n;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 2;
    }());
    return pool;
}

}  // namespace msk
