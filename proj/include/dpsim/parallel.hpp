#ifndef DPSIM_PARALLEL_HPP
#define DPSIM_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dpsim {

// Fork-join worker pool. Work is split into contiguous, statically assigned
// ranges. Nothing computed through the pool may depend on how the ranges are
// split: reductions go through fixed-size chunks combined in chunk order.
class WorkerPool {
public:
    explicit WorkerPool(int workers = 1);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int size() const { return workers_; }

    // Calls fn(begin, end) over a partition of [0, n). Ranges shorter than
    // `grain` per worker are run inline on the calling thread.
    void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                      std::size_t grain = 256);

    // Runs fn(worker_id) once on every worker and waits.
    void run_all(const std::function<void(int)>& fn);

private:
    void worker_loop(int id);

    int workers_;
    std::vector<std::thread> threads_;
    const std::function<void(int)>* task_ = nullptr;
    std::atomic<unsigned> generation_{0};
    std::atomic<int> pending_{0};
    std::atomic<bool> stop_{false};
};

// Chunk length used by every deterministic reduction in the library.
inline constexpr std::size_t kReductionChunk = 4096;

}  // namespace dpsim

#endif
