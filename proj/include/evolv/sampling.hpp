#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "evolv/types.hpp"

namespace evolv {

// Halton sequence with a Cranley-Patterson rotation drawn from `seed`.
class Halton {
public:
    Halton(int dim, std::uint64_t seed);
    int dim() const { return static_cast<int>(shift_.size()); }
    // Point k in [0,1)^dim.
    VectorXd point(std::uint64_t k) const;

private:
    std::vector<double> shift_;
};

double radical_inverse(std::uint64_t k, int base);

// 0 means: EVOLV_THREADS if set, else the hardware concurrency.
int resolve_threads(int requested);

// Calls f(i) for i in [0, n) on up to `threads` workers, each taking a
// contiguous block. Results must be written by index so that any reduction
// done afterwards in index order is independent of the thread count.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errs(t);
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = n * w / t; i < n * (w + 1) / t; ++i) f(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace evolv
