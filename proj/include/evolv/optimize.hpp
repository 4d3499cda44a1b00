#pragma once

#include <cmath>
#include <functional>

namespace evolv {

struct GoldenResult {
    double x;
    double value;
    int evaluations;
};

// Golden-section maximization of f on [lo, hi]. f may return -inf (infeasible);
// the bracket then shrinks towards the feasible side.
inline GoldenResult golden_maximize(const std::function<double(double)>& f, double lo, double hi, double xtol,
                                    int max_evals) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    int evals = 2;
    while (b - a > xtol && evals < max_evals) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    return fc >= fd ? GoldenResult{c, fc, evals} : GoldenResult{d, fd, evals};
}

}  // namespace evolv
