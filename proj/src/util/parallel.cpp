#include "qts/util/parallel.hpp"

#include <stdexcept>
#include <string>

namespace qts::util {

ThreadPool::ThreadPool(unsigned threads) {
    if (threads == 0) threads = 1;
    for (unsigned i = 0; i + 1 < threads; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard<std::mutex> lock(mu_);
        stop_ = true;
    }
    cv_.notify_all();
    for (std::thread& t : workers_) t.join();
}

void ThreadPool::worker_loop() {
    unsigned seen = 0;
    for (;;) {
        Job* job = nullptr;
        {
            std::unique_lock<std::mutex> lock(mu_);
            cv_.wait(lock, [&] { return stop_ || (job_ != nullptr && generation_ != seen); });
            if (stop_) return;
            seen = generation_;
            job = job_;
            job->active.fetch_add(1);
        }
        run_job(*job);
        if (job->active.fetch_sub(1) == 1) {
            std::lock_guard<std::mutex> lock(mu_);
            done_cv_.notify_all();
        }
    }
}

void ThreadPool::run_job(Job& job) {
    for (;;) {
        const std::size_t i = job.next.fetch_add(1);
        if (i >= job.end) return;
        try {
            (*job.fn)(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(job.error_mu);
            if (!job.error) job.error = std::current_exception();
        }
    }
}

void ThreadPool::parallel_for(std::size_t begin, std::size_t end,
                              const std::function<void(std::size_t)>& fn) {
    if (begin >= end) return;
    Job job;
    job.next.store(begin);
    job.end = end;
    job.fn = &fn;
    {
        std::lock_guard<std::mutex> lock(mu_);
        job_ = &job;
        generation_ += 1;
    }
    cv_.notify_all();
    run_job(job);
    {
        // Unpublish first so no further worker can claim the job, then wait
        // for claimed workers to drain; the job lives on this stack frame.
        std::unique_lock<std::mutex> lock(mu_);
        job_ = nullptr;
        done_cv_.wait(lock, [&] { return job.active.load() == 0; });
    }
    if (job.error) std::rethrow_exception(job.error);
}

ThreadPool& ThreadPool::global() {
    static ThreadPool pool([] {
        if (const char* env = std::getenv("QTS_THREADS")) {
            const int n = std::atoi(env);
            if (n >= 1) return static_cast<unsigned>(n);
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1u : hc;
    }());
    return pool;
}

}  // namespace qts::util
