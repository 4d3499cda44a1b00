#include "evolv/sampling.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <random>
#include <string>

namespace evolv {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

double radical_inverse(std::uint64_t k, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (k > 0) {
        r += f * static_cast<double>(k % static_cast<std::uint64_t>(base));
        k /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

Halton::Halton(int dim, std::uint64_t seed) {
    if (dim < 0 || dim > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("unsupported Halton dimension");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    shift_.resize(static_cast<std::size_t>(dim));
    for (auto& s : shift_) s = u(rng);
}

VectorXd Halton::point(std::uint64_t k) const {
    VectorXd p(dim());
    for (int d = 0; d < dim(); ++d) {
        double v = radical_inverse(k + 1, kPrimes[d]) + shift_[static_cast<std::size_t>(d)];
        p(d) = v - std::floor(v);
    }
    return p;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EVOLV_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

}  // namespace evolv
