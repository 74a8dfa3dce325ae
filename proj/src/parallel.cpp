#include "bestofn/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "bestofn/error.hpp"

namespace bestofn {

Budget::Budget(int slots) : slots_(slots), available_(slots) {
    if (slots < 1) raise(ErrorCode::invalid_argument, "budget must have at least one slot");
}

void Budget::acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [this] { return available_ > 0; });
    --available_;
}

void Budget::release() {
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++available_;
    }
    cv_.notify_one();
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (workers < 1) raise(ErrorCode::invalid_argument, "parallel_for needs at least one worker");

    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace bestofn
