#include "kinb/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kinb {

int worker_count()
{
    int hw = int(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("KINB_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return std::min(v, hw * 4);
        } catch (...) {
        }
    }
    return hw;
}

void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body)
{
    const std::ptrdiff_t workers = std::min<std::ptrdiff_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex guard;
    const std::ptrdiff_t chunk = (n + workers - 1) / workers;
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
        const std::ptrdiff_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body, &error, &guard] {
            try {
                for (std::ptrdiff_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace kinb
