#include "dpsim/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpsim {

WorkerPool::WorkerPool(int workers) : workers_(workers)
{
    if (workers_ < 1)
        throw std::invalid_argument("worker count must be >= 1");
    for (int id = 1; id < workers_; ++id)
        threads_.emplace_back([this, id] { worker_loop(id); });
}

WorkerPool::~WorkerPool()
{
    stop_.store(true);
    generation_.fetch_add(1);
    generation_.notify_all();
    for (auto& t : threads_)
        t.join();
}

void WorkerPool::worker_loop(int id)
{
    unsigned seen = 0;
    for (;;) {
        generation_.wait(seen);
        seen = generation_.load();
        if (stop_.load())
            return;
        (*task_)(id);
        if (pending_.fetch_sub(1) == 1)
            pending_.notify_all();
    }
}

void WorkerPool::run_all(const std::function<void(int)>& fn)
{
    if (workers_ == 1) {
        fn(0);
        return;
    }
    task_ = &fn;
    pending_.store(workers_ - 1);
    generation_.fetch_add(1);
    generation_.notify_all();
    fn(0);
    for (int left = pending_.load(); left != 0; left = pending_.load())
        pending_.wait(left);
    task_ = nullptr;
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                              std::size_t grain)
{
    if (n == 0)
        return;
    const std::size_t max_parts = std::max<std::size_t>(1, n / std::max<std::size_t>(grain, 1));
    const std::size_t parts = std::min<std::size_t>(static_cast<std::size_t>(workers_), max_parts);
    if (parts <= 1) {
        fn(0, n);
        return;
    }
    run_all([&](int id) {
        const auto w = static_cast<std::size_t>(id);
        if (w >= parts)
            return;
        const std::size_t begin = n * w / parts;
        const std::size_t end = n * (w + 1) / parts;
        if (begin < end)
            fn(begin, end);
    });
}

}  // namespace dpsim
