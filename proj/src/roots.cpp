#include "evolv/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evolv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Eval {
    Complex ratio;  // p(z) / p'(z)
    double residual;
    double scale;   // sum |c_k| |z|^k
};

// Newton ratio with the reversed polynomial outside the unit disc.
Eval newton_ratio(const VectorXcd& c, Complex z) {
    const Eigen::Index d = c.size() - 1;
    const double az = std::abs(z);
    if (az <= 1.0) {
        Complex p = c(d), dp = 0.0;
        double s = std::abs(c(d));
        for (Eigen::Index k = d - 1; k >= 0; --k) {
            dp = dp * z + p;
            p = p * z + c(k);
            s = s * az + std::abs(c(k));
        }
        return {dp == Complex{} ? Complex{0.0} : p / dp, std::abs(p), s};
    }
    // p(z) = z^d q(y), y = 1/z, q(y) = sum c_k y^{d-k}.
    const Complex y = 1.0 / z;
    const double ay = 1.0 / az;
    Complex q = c(0), dq = 0.0;
    double s = std::abs(c(0));
    for (Eigen::Index k = 1; k <= d; ++k) {
        dq = dq * y + q;
        q = q * y + c(k);
        s = s * ay + std::abs(c(k));
    }
    // p/p' = z / (d - y q'/q)
    const Complex denom = static_cast<double>(d) - y * dq / q;
    const double zd = std::pow(az, static_cast<double>(d));
    return {q == Complex{} ? Complex{0.0} : z / denom, std::abs(q) * zd, s * zd};
}

std::vector<Complex> initial_guesses(const VectorXcd& c) {
    const int d = static_cast<int>(c.size()) - 1;
    std::vector<int> idx;
    std::vector<double> lg;
    for (int k = 0; k <= d; ++k) {
        if (c(k) != Complex{}) {
            idx.push_back(k);
            lg.push_back(std::log(std::abs(c(k))));
        }
    }
    // Upper convex hull of (k, log|c_k|).
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        while (hull.size() >= 2) {
            const auto a = hull[hull.size() - 2], b = hull.back();
            const double cross = (idx[b] - idx[a]) * (lg[i] - lg[a]) - (lg[b] - lg[a]) * (idx[i] - idx[a]);
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    std::vector<Complex> z;
    z.reserve(static_cast<std::size_t>(d));
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const auto a = hull[h], b = hull[h + 1];
        const int cnt = idx[b] - idx[a];
        const double r = std::exp((lg[a] - lg[b]) / cnt);
        for (int j = 0; j < cnt; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / cnt + 2.0 * std::numbers::pi * h / d + 0.4;
            z.push_back(std::polar(r, theta));
        }
    }
    return z;
}

}  // namespace

double scaled_residual(const VectorXcd& coeffs, const std::vector<Complex>& roots) {
    double worst = 0.0;
    for (const Complex& r : roots) {
        const double m = std::max(1.0, std::abs(r));
        double scale = 0.0, mp = 1.0;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            scale += std::abs(coeffs(k)) * mp;
            mp *= m;
        }
        worst = std::max(worst, std::abs(horner(coeffs, r)) / scale);
    }
    return worst;
}

RootSet polynomial_roots(const VectorXcd& coeffs, const RootOptions& opts) {
    const double cmax = coeffs.size() ? coeffs.cwiseAbs().maxCoeff() : 0.0;
    if (cmax == 0.0) throw std::invalid_argument("roots of the zero polynomial are undefined");

    Eigen::Index top = coeffs.size() - 1;
    while (top > 0 && std::abs(coeffs(top)) <= opts.trim * cmax) --top;
    Eigen::Index low = 0;
    while (low < top && coeffs(low) == Complex{}) ++low;

    RootSet out;
    out.deflated_degree = static_cast<int>(top);
    out.roots.assign(static_cast<std::size_t>(low), Complex{0.0});
    if (top == low) return out;

    // Monic-normalized polynomial with the exact zero roots removed.
    VectorXcd c = coeffs.segment(low, top - low + 1) / coeffs(top);
    const int d = static_cast<int>(c.size()) - 1;

    std::vector<Complex> z;
    if (d == 1) {
        z.push_back(-c(0));
    } else {
        z = initial_guesses(c);
        std::vector<bool> done(static_cast<std::size_t>(d), false);
        for (int it = 0; it < opts.max_iterations; ++it) {
            bool all = true;
            for (int i = 0; i < d; ++i) {
                if (done[static_cast<std::size_t>(i)]) continue;
                const Eval ev = newton_ratio(c, z[i]);
                if (ev.residual <= 4.0 * kEps * ev.scale) {
                    done[static_cast<std::size_t>(i)] = true;
                    continue;
                }
                Complex sum = 0.0;
                for (int j = 0; j < d; ++j) {
                    if (j == i) continue;
                    Complex diff = z[i] - z[j];
                    if (diff == Complex{}) diff = Complex{kEps * (1.0 + std::abs(z[i])), 0.0};
                    sum += 1.0 / diff;
                }
                const Complex w = ev.ratio / (1.0 - ev.ratio * sum);
                z[i] -= w;
                if (std::abs(w) <= kEps * std::abs(z[i])) done[static_cast<std::size_t>(i)] = true;
                else all = false;
            }
            if (all) break;
        }
        // Newton polish, kept only when it lowers the residual.
        for (auto& r : z) {
            for (int s = 0; s < 2; ++s) {
                const Eval ev = newton_ratio(c, r);
                const Complex cand = r - ev.ratio;
                if (newton_ratio(c, cand).residual < ev.residual) r = cand;
                else break;
            }
        }
    }
    out.roots.insert(out.roots.end(), z.begin(), z.end());
    out.residual_bound = scaled_residual(coeffs.head(top + 1), out.roots);
    if (!(out.residual_bound <= opts.tolerance)) throw RootNotConverged(out);
    return out;
}

RootSet roots(const LambdaPolynomial& p, const RootOptions& opts) { return polynomial_roots(p.coeffs, opts); }

AbscissaValue spectral_abscissa(const LambdaPolynomial& slice, const RootOptions& opts) {
    if (slice.is_zero()) return AbscissaValue::all_lambda();
    const RootSet rs = roots(slice, opts);
    if (rs.roots.empty()) return AbscissaValue::no_roots();
    double best = -std::numeric_limits<double>::infinity();
    for (const Complex& r : rs.roots) best = std::max(best, r.real());
    return AbscissaValue::finite(best);
}

AbscissaValue spectral_abscissa(const OperatorSymbol& P, const VectorXd& xi, const RootOptions& opts) {
    return spectral_abscissa(lambda_slice(P, xi), opts);
}

}  // namespace evolv
