#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>

namespace bestofn {

// Counting gate bounding the number of in-flight backend calls for one run.
// Shared across sampling, scoring, and judging so the global budget holds
// even when prompts are processed concurrently.
class Budget {
public:
    explicit Budget(int slots);

    void acquire();
    void release();
    int slots() const noexcept { return slots_; }

    class Lease {
    public:
        // A null budget means "unbounded"; the lease is then a no-op.
        explicit Lease(Budget* budget) : budget_(budget) {
            if (budget_) budget_->acquire();
        }
        ~Lease() {
            if (budget_) budget_->release();
        }
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;

    private:
        Budget* budget_;
    };

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int slots_;
    int available_;
};

// Runs fn(0..count-1) on up to `workers` threads. Indices are claimed in
// ascending order, which is what makes candidate index assignment follow
// dispatch order. The first exception thrown by any fn is rethrown after
// all workers join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace bestofn
