#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace svb {

// Static block partition over [0, n); body(i) must only touch state owned by
// index i. Results land in index-addressed storage, so reductions done
// afterwards in index order are deterministic regardless of thread count.
template <class F>
void parallel_for(long n, F&& body, int n_threads = 0) {
    if (n <= 0) return;
    int hw = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    hw = static_cast<int>(std::max<long>(1, std::min<long>(hw, n)));
    if (hw == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(hw);
    const long chunk = (n + hw - 1) / hw;
    for (int t = 0; t < hw; ++t) {
        pool.emplace_back([&, t] {
            const long lo = t * chunk, hi = std::min(n, lo + chunk);
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Mean and standard error of a sample, accumulated in index order.
struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

MeanStdErr mean_std_error(const std::vector<double>& samples);

}  // namespace svb
