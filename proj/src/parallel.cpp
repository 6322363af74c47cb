#include "pac/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

namespace pac {

int resolve_workers(std::size_t n_tasks, int max_workers) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int w = max_workers > 0 ? max_workers : hw;
    w = std::min<int>(w, static_cast<int>(n_tasks));
    return std::max(w, 1);
}

void parallel_for(std::size_t n_tasks, int max_workers, const std::function<void(std::size_t)>& fn) {
    if (n_tasks == 0) return;
    const int workers = resolve_workers(n_tasks, max_workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex guard;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_tasks || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pac
