#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qts::util {

/// Fixed-size worker pool for index-range parallelism. Work items are
/// dispatched by atomic index, so the assignment of items to threads is
/// nondeterministic; callers that need reproducible results must write
/// per-index outputs and reduce in index order afterwards. A pool runs one
/// parallel_for at a time; calls must not be nested.
class ThreadPool {
  public:
    explicit ThreadPool(unsigned threads);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    unsigned thread_count() const { return static_cast<unsigned>(workers_.size()) + 1; }

    /// Runs fn(i) for i in [begin, end); blocks until all items finish.
    /// The calling thread participates. Exceptions propagate to the caller.
    void parallel_for(std::size_t begin, std::size_t end,
                      const std::function<void(std::size_t)>& fn);

    /// Pool sized from the QTS_THREADS environment variable, defaulting to
    /// the hardware concurrency.
    static ThreadPool& global();

  private:
    struct Job {
        std::atomic<std::size_t> next{0};
        std::size_t end = 0;
        const std::function<void(std::size_t)>* fn = nullptr;
        std::atomic<unsigned> active{0};
        std::exception_ptr error;
        std::mutex error_mu;
    };

    void worker_loop();
    void run_job(Job& job);

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    Job* job_ = nullptr;
    unsigned generation_ = 0;
    bool stop_ = false;
};

}  // namespace qts::util
