#include "evolv/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "evolv/optimize.hpp"
#include "evolv/roots.hpp"
#include "evolv/sampling.hpp"

namespace evolv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Scored {
    double value = -kInf;
    Complex lambda;
};

std::vector<Complex> slice_roots(const OperatorSymbol& P, const VectorXd& xi, bool* all_lambda = nullptr) {
    const auto slice = lambda_slice(P, xi);
    if (slice.is_zero()) {
        if (all_lambda) *all_lambda = true;
        return {};
    }
    try {
        return roots(slice).roots;
    } catch (const RootNotConverged& e) {
        return e.best().roots;
    }
}

// max Re over roots with |lambda|^2 + |xi|^2 <= bound (bound = inf: no constraint)
Scored admissible_max(const OperatorSymbol& P, const VectorXd& xi, double bound) {
    Scored s;
    const double x2 = xi.squaredNorm();
    if (x2 > bound) return s;
    bool all = false;
    for (const Complex& r : slice_roots(P, xi, &all)) {
        if (std::norm(r) + x2 <= bound && r.real() > s.value) {
            s.value = r.real();
            s.lambda = r;
        }
    }
    if (all) s.value = kInf;
    return s;
}

struct SearchResult {
    VectorXd x;
    Scored best;
    long evaluations = 0;
    bool converged = true;
};

// Dense seeding followed by coordinate-wise golden-section refinement of the
// best `starts` seeds, each inside a box of half-width h clipped to [lo, hi].
SearchResult multistart(const std::function<Scored(const VectorXd&)>& f, const std::vector<VectorXd>& seeds, double lo,
                        double hi, double h, int starts, long refine_budget, double xtol, int threads) {
    std::vector<Scored> vals(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) { vals[i] = f(seeds[i]); });
    SearchResult out;
    out.evaluations = static_cast<long>(seeds.size());
    std::vector<std::size_t> order(seeds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a].value > vals[b].value; });
    if (order.empty()) return out;
    out.x = seeds[order[0]];
    out.best = vals[order[0]];
    std::vector<std::size_t> picks;
    for (std::size_t k : order) {
        if (static_cast<int>(picks.size()) >= starts || !std::isfinite(vals[k].value)) break;
        picks.push_back(k);
    }
    if (picks.empty() || refine_budget <= 0) {
        out.converged = picks.empty();
        return out;
    }
    const int dim = static_cast<int>(seeds[0].size());
    if (dim == 0) return out;
    const long per_start = refine_budget / static_cast<long>(picks.size());
    const int per_line = static_cast<int>(std::max<long>(4, per_start / (2L * dim)));
    std::vector<SearchResult> refined(picks.size());
    parallel_for(picks.size(), threads, [&](std::size_t p) {
        SearchResult& r = refined[p];
        r.x = seeds[picks[p]];
        r.best = vals[picks[p]];
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (int d = 0; d < dim; ++d) {
                VectorXd y = r.x;
                const double a = std::max(lo, r.x(d) - h), b = std::min(hi, r.x(d) + h);
                const auto g = golden_maximize(
                    [&](double t) {
                        y(d) = t;
                        return f(y).value;
                    },
                    a, b, xtol, per_line);
                r.evaluations += g.evaluations;
                if (g.evaluations >= per_line) r.converged = false;
                if (g.value > r.best.value) {
                    y(d) = g.x;
                    r.x = y;
                    r.best = f(y);
                    ++r.evaluations;
                }
            }
        }
    });
    for (const auto& r : refined) {
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
        if (r.best.value > out.best.value) {
            out.best = r.best;
            out.x = r.x;
        }
    }
    return out;
}

std::vector<VectorXd> halton_points(int n, std::uint64_t seed, long count, double lo, double hi) {
    std::vector<VectorXd> pts;
    pts.reserve(static_cast<std::size_t>(count) + 1);
    pts.push_back(VectorXd::Zero(n));
    if (n == 0) return pts;
    const Halton h(n, seed);
    for (long k = 0; k < count; ++k) pts.push_back(lo + (hi - lo) * h.point(static_cast<std::uint64_t>(k)).array());
    return pts;
}

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v + 0.0);
    return std::string(buf, p);
}

// scale-free distance from a zero slice: max_k |Q_k(i xi)| / (sum of term moduli)
double zero_slice_gap(const OperatorSymbol& P, const VectorXd& xi) {
    const auto slice = lambda_slice(P, xi);
    double total = 0.0;
    for (const auto& [e, c] : P.terms()) {
        double t = std::abs(c);
        for (std::size_t k = 1; k < e.size(); ++k) t *= std::pow(std::abs(xi(static_cast<Eigen::Index>(k - 1))), e[k]);
        total += t;
    }
    if (slice.is_zero() || total == 0.0) return 0.0;
    return slice.coeffs.cwiseAbs().maxCoeff() / total;
}

}  // namespace

std::string config_hash(const SamplerConfig& cfg) {
    const std::string s = "seed=" + std::to_string(cfg.seed) + ";budget=" + std::to_string(cfg.budget) +
                          ";levels=" + std::to_string(cfg.max_level);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SigmaSample sigma_of_r(const OperatorSymbol& P, double r, const SamplerConfig& cfg, const std::vector<VectorXd>& extra_seeds) {
    if (!(r > 0.0)) throw std::invalid_argument("sigma_of_r needs r > 0");
    const int n = P.dim();
    const double bound = 0.5 * r * r, R = r / std::sqrt(2.0);
    const long seeds = std::max<long>(16, cfg.budget / 2);
    auto pts = halton_points(n, cfg.seed, seeds, -R, R);
    pts.insert(pts.begin(), extra_seeds.begin(), extra_seeds.end());
    const double h = n == 0 ? 0.0 : 1.5 * 2.0 * R / std::pow(static_cast<double>(seeds), 1.0 / n);
    const auto res = multistart([&](const VectorXd& xi) { return admissible_max(P, xi, bound); }, pts, -R, R, h, 8,
                                cfg.budget - static_cast<long>(pts.size()), 1e-13 * std::max(1.0, R), resolve_threads(cfg.threads));
    SigmaSample s;
    s.r = r;
    s.evaluations = res.evaluations;
    s.low_confidence = !res.converged;
    if (std::isfinite(res.best.value) || res.best.value == kInf) {
        s.sigma = res.best.value;
        s.lambda = res.best.lambda;
        s.xi = res.x;
    }
    return s;
}

SigmaCurve sigma_curve(const OperatorSymbol& P, const SamplerConfig& cfg) {
    SigmaCurve c;
    c.config_hash = config_hash(cfg);
    SamplerConfig per = cfg;
    per.budget = std::max<long>(64, cfg.budget / (cfg.max_level + 1));
    std::vector<VectorXd> carry;
    for (int j = 0; j <= cfg.max_level; ++j) {
        SigmaSample s = sigma_of_r(P, std::ldexp(1.0, j), per, carry);
        if (s.sigma) carry = {s.xi};
        c.samples.push_back(std::move(s));
    }
    return c;
}

void write_csv(std::ostream& os, const SigmaCurve& curve, int n) {
    os << "r,sigma,lambda_re,lambda_im";
    for (int k = 0; k < n; ++k) os << ",xi_" << k;
    os << "\n";
    for (const auto& s : curve.samples) {
        os << fmt(s.r);
        if (s.sigma) {
            os << "," << fmt(*s.sigma) << "," << fmt(s.lambda.real()) << "," << fmt(s.lambda.imag());
            for (int k = 0; k < n; ++k) os << "," << fmt(s.xi(k));
        } else {
            os << ",,,";
            for (int k = 0; k < n; ++k) os << ",";
        }
        os << "\n";
    }
}

std::string to_string(GrowthModel m) {
    switch (m) {
        case GrowthModel::constant: return "constant";
        case GrowthModel::logarithmic: return "logarithmic";
        default: return "power";
    }
}

GrowthFit fit_growth(const SigmaCurve& curve) {
    std::vector<double> r, s;
    for (const auto& p : curve.samples)
        if (p.sigma && std::isfinite(*p.sigma)) {
            r.push_back(p.r);
            s.push_back(*p.sigma);
        }
    const std::size_t N = r.size();
    if (N < 6) throw std::invalid_argument("fit_growth needs at least 6 defined samples");
    GrowthFit f;
    f.samples = static_cast<int>(N);
    auto rms = [&](const std::function<double(double)>& model) {
        double acc = 0.0;
        for (std::size_t k = 0; k < N; ++k) acc += std::pow(s[k] - model(r[k]), 2);
        return std::sqrt(acc / static_cast<double>(N));
    };
    auto regress = [](const std::vector<double>& x, const std::vector<double>& y, double& a, double& b) {
        Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), 2);
        Eigen::VectorXd Y(static_cast<Eigen::Index>(x.size()));
        for (std::size_t k = 0; k < x.size(); ++k) {
            A(static_cast<Eigen::Index>(k), 0) = 1.0;
            A(static_cast<Eigen::Index>(k), 1) = x[k];
            Y(static_cast<Eigen::Index>(k)) = y[k];
        }
        const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(Y);
        a = sol(0);
        b = sol(1);
    };

    f.constant = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(N);
    f.rms_constant = rms([&](double) { return f.constant; });

    std::vector<double> lx(N);
    for (std::size_t k = 0; k < N; ++k) lx[k] = std::log1p(r[k]);
    regress(lx, s, f.log_a, f.log_b);
    f.rms_log = rms([&](double x) { return f.log_a + f.log_b * std::log1p(x); });

    f.rms_power = kInf;
    std::vector<double> ur, us;
    for (std::size_t k = N / 2; k < N; ++k) {
        if (s[k] <= 0.0) {
            ur.clear();
            break;
        }
        ur.push_back(std::log(r[k]));
        us.push_back(std::log(s[k]));
    }
    if (ur.size() >= 2) {
        double la, alpha;
        regress(ur, us, la, alpha);
        if (alpha > 0.0) {
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                num += s[k] * std::pow(r[k], alpha);
                den += std::pow(r[k], 2.0 * alpha);
            }
            f.power_alpha = alpha;
            f.power_c = num / den;
            f.rms_power = rms([&](double x) { return f.power_c * std::pow(x, alpha); });
        }
    }
    const double range = *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end());
    const double best = std::min({f.rms_constant, f.rms_log, f.rms_power});
    const double slack = 1e-9 * (1.0 + range);
    if (f.rms_constant <= best + slack) f.model = GrowthModel::constant;
    else if (f.rms_log <= best + slack) f.model = GrowthModel::logarithmic;
    else f.model = GrowthModel::power;
    f.rms = f.model == GrowthModel::constant ? f.rms_constant : f.model == GrowthModel::logarithmic ? f.rms_log : f.rms_power;
    return f;
}

std::vector<Violation> check_log_region(const OperatorSymbol& P, const LogRegion& region, const SamplerConfig& cfg) {
    if (region.b < 0.0) throw std::invalid_argument("log region needs b >= 0");
    const int n = P.dim();
    const double h = std::numbers::pi / 2.0;
    const auto us = halton_points(n, cfg.seed, std::max<long>(1, cfg.budget - 1), -h, h);
    std::vector<std::vector<Violation>> found(us.size());
    parallel_for(us.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
        const VectorXd xi = us[i].array().tan();
        bool all = false;
        const auto rs = slice_roots(P, xi, &all);
        for (const Complex& r : rs) {
            const double margin = r.real() - (region.a + region.b * std::log1p(std::abs(r) + xi.norm()));
            if (margin > 0.0) found[i].push_back({r, xi, margin});
        }
        if (all) found[i].push_back({Complex{region.a + 1.0, 0.0}, xi, kInf});
    });
    std::vector<Violation> out;
    for (auto& v : found) out.insert(out.end(), v.begin(), v.end());
    return out;
}

NumericAnalysis analyze_numeric(const OperatorSymbol& P, const SamplerConfig& cfg) {
    NumericAnalysis out;
    PetrovskiiVerdict& v = out.verdict;
    v.method = VerdictMethod::numeric;
    out.curve.config_hash = config_hash(cfg);
    const int n = P.dim();
    const int threads = resolve_threads(cfg.threads);
    const double hu = std::numbers::pi / 2.0;
    const long compact = std::max<long>(64, cfg.budget / 4);
    const auto us = halton_points(n, cfg.seed, compact / 2, -hu, hu);
    const double spacing = n == 0 ? 0.0 : 1.5 * std::numbers::pi / std::pow(static_cast<double>(us.size()), 1.0 / n);
    const double edge = hu - 1e-9;

    // Zero slices: all coefficients of the slice vanish together.
    {
        std::vector<VectorXd> seeds = us;
        const auto zs = multistart(
            [&](const VectorXd& u) { return Scored{-zero_slice_gap(P, u.array().tan().matrix()), Complex{}}; }, seeds,
            -edge, edge, spacing, 4, 2000, 1e-15, threads);
        if (-zs.best.value <= 1e-12) {
            const VectorXd xi = zs.x.array().tan();
            v.classification = Classification::unbounded;
            v.omega0 = kInf;
            v.evidence.push_back({"zero_slice", "every coefficient of the slice vanishes: all lambda are roots",
                                  std::vector<double>(xi.data(), xi.data() + xi.size()), std::nullopt, kInf});
            return out;
        }
    }
    if (!P.depends_on_lambda()) {
        v.classification = Classification::bounded;
        v.omega0 = -kInf;
        v.evidence.push_back({"no_roots", "P does not involve lambda and no real zero was found", {}, std::nullopt, -kInf});
        return out;
    }

    const auto cs = multistart([&](const VectorXd& u) { return admissible_max(P, u.array().tan().matrix(), kInf); }, us,
                               -edge, edge, spacing, 8, compact - static_cast<long>(us.size()), 1e-15, threads);
    out.compact_sup = cs.best.value;
    {
        const VectorXd xi = cs.x.array().tan();
        EvidenceRecord rec{"compact_sup", "sup of a(xi) over compactified samples xi = tan(u)",
                           std::vector<double>(xi.data(), xi.data() + xi.size()), std::nullopt, cs.best.value};
        if (std::isfinite(cs.best.value)) rec.lambda = cs.best.lambda;
        v.evidence.push_back(rec);
    }

    SamplerConfig curve_cfg = cfg;
    curve_cfg.budget = std::max<long>(64, cfg.budget - compact);
    out.curve = sigma_curve(P, curve_cfg);
    out.curve.config_hash = config_hash(cfg);
    std::vector<const SigmaSample*> defined;
    for (const auto& s : out.curve.samples)
        if (s.sigma) defined.push_back(&s);

    if (defined.empty() && cs.best.value == -kInf) {
        v.classification = Classification::bounded;
        v.omega0 = -kInf;
        v.evidence.push_back({"no_roots", "no slice sampled has a root", {}, std::nullopt, -kInf});
        return out;
    }
    if (defined.size() < 6) {
        v.classification = Classification::undetermined;
        v.evidence.push_back({"sigma_curve", "fewer than 6 radii carry admissible roots", {}, std::nullopt,
                              static_cast<double>(defined.size())});
        return out;
    }
    out.fit = fit_growth(out.curve);
    const GrowthFit& f = *out.fit;
    v.evidence.push_back({"growth_fit",
                          "model " + to_string(f.model) + "; log slope " + fmt(f.log_b) + "; power exponent " + fmt(f.power_alpha),
                          {}, std::nullopt, f.rms});
    const auto& top = out.curve.samples.back();
    const auto& prev = out.curve.samples[out.curve.samples.size() - 2];
    double lo = *defined.front()->sigma, hi = lo;
    for (const auto* s : defined) {
        lo = std::min(lo, *s->sigma);
        hi = std::max(hi, *s->sigma);
    }
    auto witness = [&](const SigmaSample& s, const std::string& what) {
        v.evidence.push_back({"witness", what, std::vector<double>(s.xi.data(), s.xi.data() + s.xi.size()), s.lambda, *s.sigma});
    };
    if (top.sigma && prev.sigma && std::abs(*top.sigma - *prev.sigma) < 1e-4) {
        v.classification = Classification::bounded;
        const double w = std::max(out.compact_sup, *top.sigma) + 0.0;  // no negative zero
        v.omega0 = w;
        v.omega0_error = std::max(std::abs(*top.sigma - *prev.sigma), 1e-9 * (1.0 + std::abs(w)));
        witness(top, "plateau of sigma(r) at the largest radius");
    } else if (f.power_alpha > 0.05 && f.rms_power < 0.1 * (hi - lo)) {
        v.classification = Classification::unbounded;
        v.omega0 = kInf;
        witness(top, "root with the largest real part at the largest radius");
    } else {
        v.classification = Classification::undetermined;
        if (top.sigma) witness(top, "largest radius sample");
    }
    return out;
}

}  // namespace evolv
