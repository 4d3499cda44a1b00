#include "evolv/fundsol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "evolv/fft.hpp"
#include "evolv/roots.hpp"
#include "evolv/sampling.hpp"

namespace evolv {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

// Tukey profile: each side tapers over the fraction `taper` of the full band
// [-extent, extent], so taper = 0.5 is a Hann window.
double window_profile(double xi, double extent, double taper) {
    const double t = std::abs(xi) / extent;
    const double flat = 1.0 - 2.0 * taper;
    if (t <= flat) return 1.0;
    if (t >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (t - flat) / (2.0 * taper)));
}

// Slice coefficients for every spatial frequency tuple of a separable grid.
// axis_values[k] lists the xi_{k+1} values.
std::vector<VectorXcd> spatial_slices(const OperatorSymbol& P, const std::vector<std::vector<double>>& axis_values) {
    const int n = P.dim();
    std::size_t count = 1;
    for (const auto& v : axis_values) count *= v.size();
    std::vector<VectorXcd> out(count);
    VectorXd xi(n);
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rest = flat;
        for (int k = n - 1; k >= 0; --k) {
            const auto& v = axis_values[static_cast<std::size_t>(k)];
            xi(k) = v[rest % v.size()];
            rest /= v.size();
        }
        out[flat] = lambda_slice(P, xi).coeffs;
    }
    return out;
}

Complex eval_slice(const VectorXcd& c, Complex lambda) { return c.size() ? horner(c, lambda) : Complex{0.0}; }

double sign_of(std::size_t s) { return s % 2 ? -1.0 : 1.0; }

}  // namespace

// ---------------------------------------------------------------- GridSpec

double GridSpec::spacing() const { return kPi / freq_extent; }

std::size_t GridSpec::size() const { return ipow(static_cast<std::size_t>(points), axes()); }

double GridSpec::window_at(const double* xi) const {
    if (window == Window::none) return 1.0;
    double w = 1.0;
    for (int k = 0; k < axes(); ++k) w *= window_profile(xi[k], freq_extent, taper);
    return w;
}

void GridSpec::validate() const {
    if (n < 0) throw std::invalid_argument("grid dimension must be nonnegative");
    if (!(freq_extent > 0.0)) throw std::invalid_argument("frequency extent must be positive");
    if (points < 8 || !is_power_of_two(points)) throw std::invalid_argument("points per axis must be a power of two >= 8");
    if (window == Window::raised_cosine && !(taper > 0.0 && taper <= 0.5))
        throw std::invalid_argument("taper fraction must lie in (0, 0.5]");
}

std::string to_string(FieldRole r) {
    switch (r) {
        case FieldRole::symbol_inverse: return "symbol_inverse";
        case FieldRole::N_sigma: return "N_sigma";
        case FieldRole::N: return "N";
        case FieldRole::rhs: return "rhs";
        default: return "solution";
    }
}

FieldRole field_role_from_string(const std::string& s) {
    for (FieldRole r : {FieldRole::symbol_inverse, FieldRole::N_sigma, FieldRole::N, FieldRole::rhs, FieldRole::solution})
        if (to_string(r) == s) return r;
    throw std::invalid_argument("unknown field role '" + s + "'");
}

// ---------------------------------------------------------------- GridField

std::size_t GridField::index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int k : idx) flat = flat * static_cast<std::size_t>(spec.points) + static_cast<std::size_t>(k);
    return flat;
}

std::vector<int> GridField::multi_index(std::size_t flat) const {
    std::vector<int> idx(static_cast<std::size_t>(spec.axes()));
    for (int k = spec.axes() - 1; k >= 0; --k) {
        idx[static_cast<std::size_t>(k)] = static_cast<int>(flat % static_cast<std::size_t>(spec.points));
        flat /= static_cast<std::size_t>(spec.points);
    }
    return idx;
}

VectorXd GridField::point(std::size_t flat) const {
    const auto idx = multi_index(flat);
    VectorXd x(spec.axes());
    for (int k = 0; k < spec.axes(); ++k) x(k) = spec.coordinate(idx[static_cast<std::size_t>(k)]);
    return x;
}

bool GridField::reliable(std::size_t flat) const {
    const VectorXd x = point(flat);
    return x.cwiseAbs().maxCoeff() <= spec.reliable_extent() + 1e-12;
}

Complex GridField::at(const VectorXd& x) const {
    const int A = spec.axes();
    if (x.size() != A) throw std::invalid_argument("point has the wrong dimension");
    std::vector<int> base(static_cast<std::size_t>(A));
    std::vector<double> frac(static_cast<std::size_t>(A));
    for (int k = 0; k < A; ++k) {
        const double u = x(k) / spec.spacing() + spec.points / 2;
        const int b = static_cast<int>(std::floor(u));
        if (b < 0 || b + 1 >= spec.points) throw std::out_of_range("point outside the grid");
        base[static_cast<std::size_t>(k)] = b;
        frac[static_cast<std::size_t>(k)] = u - b;
    }
    Complex acc = 0.0;
    for (int corner = 0; corner < (1 << A); ++corner) {
        std::vector<int> idx = base;
        double w = 1.0;
        for (int k = 0; k < A; ++k) {
            const bool up = corner & (1 << k);
            idx[static_cast<std::size_t>(k)] += up;
            w *= up ? frac[static_cast<std::size_t>(k)] : 1.0 - frac[static_cast<std::size_t>(k)];
        }
        if (w != 0.0) acc += w * values[index(idx)];
    }
    return acc;
}

// ---------------------------------------------------------------- grid construction

GridField symbol_inverse_on_line(const OperatorSymbol& P, const GridSpec& spec, int threads) {
    spec.validate();
    if (spec.n != P.dim()) throw std::invalid_argument("grid and operator dimensions differ");
    const int M = spec.points;
    std::vector<double> freqs(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) freqs[static_cast<std::size_t>(j)] = spec.frequency(j);
    const auto slices = spatial_slices(P, std::vector<std::vector<double>>(static_cast<std::size_t>(spec.n), freqs));

    GridField f;
    f.spec = spec;
    f.role = FieldRole::symbol_inverse;
    f.values.resize(spec.size());
    const std::size_t inner = slices.size();
    std::vector<double> mins(static_cast<std::size_t>(M), std::numeric_limits<double>::infinity());
    parallel_for(static_cast<std::size_t>(M), resolve_threads(threads), [&](std::size_t j0) {
        std::vector<double> xi(static_cast<std::size_t>(spec.axes()));
        xi[0] = freqs[j0];
        const Complex lambda{spec.sigma, freqs[j0]};
        for (std::size_t r = 0; r < inner; ++r) {
            std::size_t rest = r;
            for (int k = spec.n; k >= 1; --k) {
                xi[static_cast<std::size_t>(k)] = freqs[rest % static_cast<std::size_t>(M)];
                rest /= static_cast<std::size_t>(M);
            }
            const Complex p = eval_slice(slices[r], lambda);
            mins[j0] = std::min(mins[j0], std::abs(p));
            f.values[j0 * inner + r] = p == Complex{} ? Complex{0.0} : spec.window_at(xi.data()) / p;
        }
    });
    f.min_modulus = *std::min_element(mins.begin(), mins.end());
    if (f.min_modulus <= 1e-8 * P.coefficient_scale()) throw SigmaTooClose(f.min_modulus);
    return f;
}

namespace {

// Spatial samples of (dxi / 2pi)^A sum_j exp(i x_k xi_j) hat_j, in place.
void inverse_transform(std::vector<Complex>& data, const GridSpec& spec, int threads) {
    const int M = spec.points, A = spec.axes();
    const std::size_t total = data.size();
    auto phase = [&](std::size_t flat) {
        std::size_t s = 0;
        for (int k = 0; k < A; ++k) {
            s += flat % static_cast<std::size_t>(M);
            flat /= static_cast<std::size_t>(M);
        }
        return sign_of(s);
    };
    for (std::size_t i = 0; i < total; ++i) data[i] *= phase(i);
    fft_nd(data, M, A, +1, threads);
    const double scale = std::pow(spec.dxi() / (2.0 * kPi), A) * sign_of(static_cast<std::size_t>(A) * static_cast<std::size_t>(M / 2));
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale * phase(i);
}

void forward_transform(std::vector<Complex>& data, const GridSpec& spec, int threads) {
    const int M = spec.points, A = spec.axes();
    const std::size_t total = data.size();
    auto phase = [&](std::size_t flat) {
        std::size_t s = 0;
        for (int k = 0; k < A; ++k) {
            s += flat % static_cast<std::size_t>(M);
            flat /= static_cast<std::size_t>(M);
        }
        return sign_of(s);
    };
    for (std::size_t i = 0; i < total; ++i) data[i] *= phase(i);
    fft_nd(data, M, A, -1, threads);
    const double scale = std::pow(spec.spacing(), A) * sign_of(static_cast<std::size_t>(A) * static_cast<std::size_t>(M / 2));
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale * phase(i);
}

double x0_of(const GridSpec& spec, std::size_t flat) {
    const std::size_t per = ipow(static_cast<std::size_t>(spec.points), spec.n);
    return spec.coordinate(static_cast<int>(flat / per));
}

}  // namespace

GridField build_fundamental_solution(const OperatorSymbol& P, const GridSpec& spec, int threads) {
    const int t = resolve_threads(threads);
    GridField f = symbol_inverse_on_line(P, spec, t);
    inverse_transform(f.values, spec, t);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] *= std::exp(spec.sigma * x0_of(spec, i));
    f.role = FieldRole::N;
    return f;
}

// ---------------------------------------------------------------- quadrature

namespace {

struct AxisGrid {
    double h;
    std::vector<double> xi;
};

AxisGrid make_axis(double center, double half, double h) {
    AxisGrid a;
    a.h = h;
    const long K = static_cast<long>(std::ceil(half / h));
    for (long k = -K; k <= K; ++k) a.xi.push_back(center + static_cast<double>(k) * h);
    return a;
}

struct QuadSum {
    Complex value;
    double abs_sum = 0.0;   // (2 pi)^{-A} h^A sum |integrand|
    double tail = 0.0;      // Gaussian tail beyond the box
    long points = 0;
};

QuadSum trapezoid(const OperatorSymbol& P, double sigma, const TestCombination& phi, Complex lambda, bool multiply,
                  const std::vector<AxisGrid>& axes, const std::vector<double>& half, int threads) {
    const int A = static_cast<int>(axes.size());
    const int n = A - 1;
    const std::size_t T = phi.size();
    // per-axis, per-term Fourier factors
    std::vector<std::vector<std::vector<Complex>>> tab(static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
        auto& ta = tab[static_cast<std::size_t>(a)];
        ta.assign(T, {});
        for (std::size_t t = 0; t < T; ++t) {
            for (double x : axes[static_cast<std::size_t>(a)].xi) {
                const Complex zeta = a == 0 ? Complex{-x, 0.0} + kI * (Complex{sigma, 0.0} - lambda) : Complex{-x, 0.0};
                ta[t].push_back(phi[t].phi.fourier_axis(a, zeta));
            }
        }
    }
    std::vector<std::vector<double>> spatial;
    for (int a = 1; a < A; ++a) spatial.push_back(axes[static_cast<std::size_t>(a)].xi);
    const auto slices = multiply ? std::vector<VectorXcd>{} : spatial_slices(P, spatial);
    std::size_t inner = 1;
    for (const auto& v : spatial) inner *= v.size();

    const std::size_t K0 = axes[0].xi.size();
    std::vector<Complex> part(K0);
    std::vector<double> apart(K0), face(K0 * static_cast<std::size_t>(A), 0.0);
    parallel_for(K0, resolve_threads(threads), [&](std::size_t i0) {
        const Complex lam{sigma, axes[0].xi[i0]};
        Complex acc = 0.0;
        double aacc = 0.0;
        std::vector<std::size_t> idx(static_cast<std::size_t>(n));
        for (std::size_t r = 0; r < inner; ++r) {
            std::size_t rest = r;
            for (int k = n - 1; k >= 0; --k) {
                idx[static_cast<std::size_t>(k)] = rest % spatial[static_cast<std::size_t>(k)].size();
                rest /= spatial[static_cast<std::size_t>(k)].size();
            }
            Complex ph = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                Complex term = phi[t].coeff * tab[0][t][i0];
                for (int k = 0; k < n; ++k) term *= tab[static_cast<std::size_t>(k + 1)][t][idx[static_cast<std::size_t>(k)]];
                ph += term;
            }
            Complex v = ph;
            if (!multiply) {
                const Complex p = eval_slice(slices[r], lam);
                if (p == Complex{}) throw SigmaTooClose(0.0);
                v /= p;
            }
            acc += v;
            aacc += std::abs(v);
            const double av = std::abs(v);
            if (i0 == 0 || i0 + 1 == K0) face[i0 * static_cast<std::size_t>(A)] = std::max(face[i0 * static_cast<std::size_t>(A)], av);
            for (int k = 0; k < n; ++k) {
                const std::size_t ik = idx[static_cast<std::size_t>(k)];
                if (ik == 0 || ik + 1 == spatial[static_cast<std::size_t>(k)].size()) {
                    double& fm = face[i0 * static_cast<std::size_t>(A) + static_cast<std::size_t>(k + 1)];
                    fm = std::max(fm, av);
                }
            }
        }
        part[i0] = acc;
        apart[i0] = aacc;
    });
    QuadSum q;
    double vol = 1.0;
    for (const auto& ax : axes) vol *= ax.h;
    const double norm = vol / std::pow(2.0 * kPi, A);
    for (std::size_t i = 0; i < K0; ++i) {
        q.value += part[i];
        q.abs_sum += apart[i];
    }
    q.value *= norm;
    q.abs_sum *= norm;
    q.points = static_cast<long>(K0 * inner);
    // Gaussian tail: int_B^inf e^{-w^2 x^2/2} ~ e^{-w^2 B^2/2} / (w^2 B), with the
    // face maximum standing in for the boundary value.
    for (int a = 0; a < A; ++a) {
        double fm = 0.0;
        for (std::size_t i = 0; i < K0; ++i) fm = std::max(fm, face[i * static_cast<std::size_t>(A) + static_cast<std::size_t>(a)]);
        double wmin = std::numeric_limits<double>::infinity();
        for (const auto& t : phi) wmin = std::min(wmin, t.phi.width()(a));
        double cross = 1.0;
        for (int b = 0; b < A; ++b)
            if (b != a) cross *= 2.0 * half[static_cast<std::size_t>(b)];
        q.tail += 2.0 * fm * cross / (wmin * wmin * half[static_cast<std::size_t>(a)]) / std::pow(2.0 * kPi, A);
    }
    return q;
}

}  // namespace

PairingResult pair_with_test(const OperatorSymbol& P, double sigma, const TestCombination& phi, const QuadratureConfig& q,
                             Complex lambda, bool multiply_by_symbol) {
    if (phi.empty()) return {0.0, 0.0, sigma, true, 0};
    const int A = P.dim() + 1;
    for (const auto& t : phi)
        if (t.phi.dims() != A) throw std::invalid_argument("test function dimension mismatch");
    // box half-widths from the Gaussian decay of phi^, steps from the spatial extent
    std::vector<double> half(static_cast<std::size_t>(A), 0.0), h(static_cast<std::size_t>(A), 0.0);
    for (int a = 0; a < A; ++a) {
        double B = 0.0, X = 0.0;
        for (const auto& t : phi) {
            const double m = t.phi.order()[static_cast<std::size_t>(a)];
            B = std::max(B, (9.0 + 2.0 * std::sqrt(m + 1.0)) / t.phi.width()(a));
            X = std::max(X, std::abs(t.phi.center()(a)) + t.phi.support_radius(a));
        }
        half[static_cast<std::size_t>(a)] = B;
        h[static_cast<std::size_t>(a)] = 2.0 * kPi / (2.0 * X + 8.0);
    }
    auto run = [&](const std::vector<double>& hs) {
        std::vector<AxisGrid> axes;
        for (int a = 0; a < A; ++a)
            axes.push_back(make_axis(a == 0 ? lambda.imag() : 0.0, half[static_cast<std::size_t>(a)], hs[static_cast<std::size_t>(a)]));
        return trapezoid(P, sigma, phi, lambda, multiply_by_symbol, axes, half, q.threads);
    };
    PairingResult res;
    res.sigma = sigma;
    QuadSum cur = run(h);
    res.evaluations = cur.points;
    for (int level = 0;; ++level) {
        std::vector<double> delta(static_cast<std::size_t>(A));
        std::vector<QuadSum> finer(static_cast<std::size_t>(A));
        for (int a = 0; a < A; ++a) {
            auto hs = h;
            hs[static_cast<std::size_t>(a)] *= 0.5;
            finer[static_cast<std::size_t>(a)] = run(hs);
            res.evaluations += finer[static_cast<std::size_t>(a)].points;
            delta[static_cast<std::size_t>(a)] = std::abs(finer[static_cast<std::size_t>(a)].value - cur.value);
        }
        const double target = q.tol * std::max(cur.abs_sum, 1e-300);
        std::vector<int> refine;
        for (int a = 0; a < A; ++a)
            if (delta[static_cast<std::size_t>(a)] > target) refine.push_back(a);
        if (refine.empty() || level + 1 >= q.max_levels || res.evaluations > q.max_points) {
            res.value = cur.value;
            res.error = std::accumulate(delta.begin(), delta.end(), 0.0) + cur.tail;
            res.converged = refine.empty();
            return res;
        }
        for (int a : refine) h[static_cast<std::size_t>(a)] *= 0.5;
        if (refine.size() == 1) cur = finer[static_cast<std::size_t>(refine[0])];
        else {
            cur = run(h);
            res.evaluations += cur.points;
        }
    }
}

PairingResult pair_with_test(const OperatorSymbol& P, double sigma, const TestFunction& phi, const QuadratureConfig& q,
                             Complex lambda) {
    return pair_with_test(P, sigma, TestCombination{{1.0, phi}}, q, lambda, false);
}

PairingResult pair_on_grid(const GridField& field, const OperatorSymbol& P, const TestCombination& psi) {
    const GridSpec& s = field.spec;
    const int A = s.axes();
    PairingResult r;
    r.sigma = s.sigma;
    Complex fine = 0.0, coarse = 0.0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (!field.reliable(i)) continue;
        const Complex v = field.values[i] * evaluate(psi, field.point(i));
        fine += v;
        const auto idx = field.multi_index(i);
        if (std::all_of(idx.begin(), idx.end(), [](int k) { return k % 2 == 0; })) coarse += v;
    }
    const double h = s.spacing();
    fine *= std::pow(h, A);
    coarse *= std::pow(2.0 * h, A);
    r.value = fine;
    r.evaluations = static_cast<long>(field.values.size());
    // window leakage: (2pi)^{-A} int |N^_sigma| (1 - W) |psi^|
    double leak = 0.0;
    if (s.window != Window::none) {
        const int M = s.points;
        std::vector<double> freqs(static_cast<std::size_t>(M));
        for (int j = 0; j < M; ++j) freqs[static_cast<std::size_t>(j)] = s.frequency(j);
        const auto slices = spatial_slices(P, std::vector<std::vector<double>>(static_cast<std::size_t>(s.n), freqs));
        std::vector<double> xi(static_cast<std::size_t>(A));
        VectorXcd zeta(A);
        for (std::size_t flat = 0; flat < s.size(); ++flat) {
            std::size_t rest = flat;
            for (int k = A - 1; k >= 0; --k) {
                xi[static_cast<std::size_t>(k)] = freqs[rest % static_cast<std::size_t>(M)];
                rest /= static_cast<std::size_t>(M);
            }
            const double w = s.window_at(xi.data());
            if (w >= 1.0) continue;
            zeta(0) = Complex{-xi[0], s.sigma};
            for (int k = 1; k < A; ++k) zeta(k) = -xi[static_cast<std::size_t>(k)];
            const Complex p = eval_slice(slices[flat % slices.size()], Complex{s.sigma, xi[0]});
            leak += (1.0 - w) * std::abs(fourier(psi, zeta)) / std::max(std::abs(p), 1e-300);
        }
        leak *= std::pow(s.dxi() / (2.0 * kPi), A);
    }
    r.error = std::abs(fine - coarse) + leak;
    return r;
}

// ---------------------------------------------------------------- verification battery

std::vector<DeltaResidual> verify_delta_property(const OperatorSymbol& P, double sigma, const std::vector<TestFunction>& suite,
                                                 const QuadratureConfig& q) {
    std::vector<DeltaResidual> out;
    for (const auto& phi : suite) {
        const double target = phi.value(VectorXd::Zero(phi.dims()));
        const auto applied = pair_with_test(P, sigma, apply_operator_expansion(P, true, phi), q);
        const auto multiplied = pair_with_test(P, sigma, TestCombination{{1.0, phi}}, q, 0.0, true);
        out.push_back({std::abs(applied.value - target), std::abs(multiplied.value - target), applied.error + multiplied.error});
    }
    return out;
}

double verify_sigma_independence(const OperatorSymbol& P, double sigma1, double sigma2, const TestFunction& phi,
                                 const QuadratureConfig& q) {
    const Complex a = pair_with_test(P, sigma1, phi, q).value;
    const Complex b = pair_with_test(P, sigma2, phi, q).value;
    return std::abs(a - b) / std::max(std::abs(a), 1e-300);
}

TestFunction support_probe(int n, double offset) {
    VectorXd c = VectorXd::Zero(n + 1), w = VectorXd::Constant(n + 1, 0.5);
    c(0) = offset;
    w(0) = std::abs(offset) / 9.0;
    return TestFunction::gaussian(c, w);
}

std::vector<double> verify_support(const OperatorSymbol& P, double sigma, const std::vector<double>& offsets,
                                   const QuadratureConfig& q) {
    std::vector<double> out;
    for (double off : offsets) {
        if (!(off < 0.0)) throw std::invalid_argument("support offsets must be negative");
        out.push_back(std::abs(pair_with_test(P, sigma, support_probe(P.dim(), off), q).value));
    }
    return out;
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    return sxy / sxx;
}

}  // namespace

DecayFit verify_decay(const OperatorSymbol& P, double sigma, Complex lambda, const std::vector<double>& probes,
                      const QuadratureConfig& q) {
    DecayFit f;
    f.t = probes.empty() ? std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8} : probes;
    if (f.t.size() < 2) throw std::invalid_argument("decay fit needs at least two probes");
    bool vanished = false;
    for (double t : f.t) {
        VectorXd c = VectorXd::Zero(P.dim() + 1);
        c(0) = t;
        const auto phi = TestFunction::gaussian(c, VectorXd::Ones(P.dim() + 1));
        const double v = std::abs(pair_with_test(P, sigma, TestCombination{{1.0, phi}}, q, lambda).value);
        vanished |= v < 1e-14;
        f.log_abs.push_back(std::log(v));
    }
    if (vanished) {
        f.rate = f.tail_rate = -std::numeric_limits<double>::infinity();
        return f;
    }
    f.rate = slope(f.t, f.log_abs);
    const std::size_t h = f.t.size() / 2;
    f.tail_rate = slope({f.t.begin() + static_cast<long>(h), f.t.end()}, {f.log_abs.begin() + static_cast<long>(h), f.log_abs.end()});
    return f;
}

// ---------------------------------------------------------------- solver

SolveResult convolution_solve(const OperatorSymbol& P, const GridField& rhs, int threads) {
    const GridSpec& s = rhs.spec;
    s.validate();
    if (rhs.values.size() != s.size()) throw std::invalid_argument("right-hand side does not match its grid");
    const int t = resolve_threads(threads);
    // "Supported in x0 >= 0" up to the same tolerance used for N itself:
    // at most 1e-3 of the mass below x0 = -0.5.
    double total = 0.0, below = 0.0;
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
        const double a = std::abs(rhs.values[i]);
        total += a;
        if (x0_of(s, i) < -0.5) below += a;
    }
    SolveResult out;
    out.solution.spec = s;
    out.solution.role = FieldRole::solution;
    if (total == 0.0) {
        out.solution.values.assign(s.size(), 0.0);
        return out;
    }
    if (below > 1e-3 * total) throw SupportViolation(below / total);

    const GridField inv = symbol_inverse_on_line(P, s, t);
    std::vector<Complex> g(rhs.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-s.sigma * x0_of(s, i)) * rhs.values[i];
    std::vector<Complex> ghat = g;
    forward_transform(ghat, s, t);
    std::vector<Complex> u(ghat.size()), check(ghat.size());
    // P on the line times U^_sigma, for the residual
    const int M = s.points;
    std::vector<double> freqs(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) freqs[static_cast<std::size_t>(j)] = s.frequency(j);
    const auto slices = spatial_slices(P, std::vector<std::vector<double>>(static_cast<std::size_t>(s.n), freqs));
    const std::size_t inner = slices.size();
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = inv.values[i] * ghat[i];
        check[i] = eval_slice(slices[i % inner], Complex{s.sigma, freqs[i / inner]}) * u[i];
    }
    inverse_transform(u, s, t);
    inverse_transform(check, s, t);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!out.solution.reliable(i)) continue;
        num = std::max(num, std::abs(check[i] - g[i]));
        den = std::max(den, std::abs(g[i]));
    }
    out.residual = den > 0.0 ? num / den : 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(s.sigma * x0_of(s, i));
    out.solution.values = std::move(u);
    return out;
}

// ---------------------------------------------------------------- modulus scan

ModulusScan min_modulus_scan(const OperatorSymbol& P, double sigma, double radius, int samples) {
    if (!(radius > 0.0) || samples < 1) throw std::invalid_argument("scan needs a positive radius and samples");
    const int A = P.dim() + 1;
    auto modulus = [&](const VectorXd& z) {
        return std::abs(eval_symbol(P, Complex{sigma, z(0)}, VectorXd(z.tail(A - 1))));
    };
    ModulusScan out;
    out.argmin = VectorXd::Zero(A);
    out.inf_modulus = modulus(out.argmin);
    const Halton hal(A, 7);
    for (int k = 0; k < samples; ++k) {
        const VectorXd z = radius * (2.0 * hal.point(static_cast<std::uint64_t>(k)).array() - 1.0);
        if (z.norm() > radius) continue;
        const double m = modulus(z);
        if (m < out.inf_modulus) {
            out.inf_modulus = m;
            out.argmin = z;
        }
    }
    // shells at geometric radii from 1 to R
    const int shells = std::max(2, static_cast<int>(std::floor(std::log2(radius))) + 1);
    const int per = std::max(16, samples / (2 * shells));
    std::vector<double> lr, lm;
    for (int s = 0; s < shells; ++s) {
        const double rho = std::ldexp(1.0, s);
        if (rho > radius) break;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < per; ++k) {
            VectorXd d;
            if (A == 1) {
                d = VectorXd::Constant(1, k % 2 ? 1.0 : -1.0);
            } else if (A == 2) {
                const double th = 2.0 * kPi * (k + 0.5) / per;
                d = VectorXd(2);
                d << std::cos(th), std::sin(th);
            } else {
                d = 2.0 * hal.point(static_cast<std::uint64_t>(samples + k)).array() - 1.0;
                if (d.norm() == 0.0) continue;
                d.normalize();
            }
            best = std::min(best, modulus(rho * d));
        }
        out.shell_radius.push_back(rho);
        out.shell_min.push_back(best);
        lr.push_back(std::log(rho));
        lm.push_back(std::log(std::max(best, 1e-300)));
    }
    out.mu_prime = lr.size() >= 2 ? -slope(lr, lm) : 0.0;
    return out;
}

}  // namespace evolv
