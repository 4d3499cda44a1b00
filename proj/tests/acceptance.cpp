// Acceptance run: one PASS/FAIL line per criterion with the measured value and
// its threshold. Exit status is nonzero if any criterion fails.
//
//   acceptance <path-to-evolv>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "evolv/fundsol.hpp"
#include "evolv/numeric.hpp"
#include "evolv/puiseux.hpp"
#include "evolv/roots.hpp"
#include "oracles.hpp"

using namespace evolv;

namespace {

int failures = 0;

void detail(const std::string& s) { std::printf("    %s\n", s.c_str()); }

void report(int id, const std::string& what, bool pass, const std::string& measured, const std::string& threshold) {
    std::printf("criterion %2d %s  %s: measured %s, threshold %s\n", id, pass ? "PASS" : "FAIL", what.c_str(),
                measured.c_str(), threshold.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v, const char* f = "%.3e") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

VectorXd v1(double a) {
    VectorXd x(1);
    x << a;
    return x;
}

VectorXd v2(double a, double b) {
    VectorXd x(2);
    x << a, b;
    return x;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<TestFunction> gaussian_suite() {
    return {TestFunction::gaussian(v2(0.0, 0.0), v2(1.0, 1.0)), TestFunction::gaussian(v2(0.5, -0.3), v2(0.7, 0.9)),
            TestFunction::gaussian(v2(-0.4, 0.2), v2(0.8, 0.6)), TestFunction::gaussian(v2(1.0, 1.0), v2(0.5, 0.5)),
            TestFunction::gaussian(v2(0.2, -1.0), v2(1.2, 0.8))};
}

// ------------------------------------------------------------------ 1

void verdicts() {
    int mismatches = 0;
    double worst_exact = 0.0, worst_numeric = 0.0;
    for (const auto& e : corpus::operators()) {
        const auto ex = petrovskii_verdict_exact_1d(e.P);
        const auto num = analyze_numeric(e.P);
        const bool ok = ex.classification == e.expected && num.verdict.classification == e.expected;
        if (!ok) {
            ++mismatches;
            detail(e.name + ": exact " + to_string(ex.classification) + ", numeric " +
                   to_string(num.verdict.classification) + ", expected " + to_string(e.expected));
        }
        if (e.expected != Classification::bounded || !ok) continue;
        if (!ex.omega0 || !num.verdict.omega0) {
            ++mismatches;
            continue;
        }
        if (std::isinf(e.omega0)) {
            if (*ex.omega0 != e.omega0 || *num.verdict.omega0 != e.omega0) ++mismatches;
            continue;
        }
        worst_exact = std::max(worst_exact, std::abs(*ex.omega0 - e.omega0));
        worst_numeric = std::max(worst_numeric, std::abs(*num.verdict.omega0 - e.omega0));
    }
    report(1, "corpus verdicts", mismatches == 0 && worst_exact <= 1e-6 && worst_numeric <= 1e-3,
           std::to_string(mismatches) + " mismatches, omega0 error exact " + fmt(worst_exact) + " / numeric " +
               fmt(worst_numeric),
           "0 mismatches, 1e-6 / 1e-3");
}

// ------------------------------------------------------------------ 2

void random_roots() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> deg(1, 12);
    double worst = 0.0, worst_residual = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = deg(rng);
        VectorXcd c(d + 1);
        for (int k = 0; k <= d; ++k) c(k) = std::polar(std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
        const auto r = polynomial_roots(c);
        worst = std::max(worst, oracle::matched_distance(r.roots, oracle::companion_roots(c)));
        // per-root residual against sum |c_k| |z|^k, independent of the engine's own bound
        for (const Complex& z : r.roots) {
            Complex p = 0.0;
            double scale = 0.0;
            for (int k = d; k >= 0; --k) {
                p = p * z + c(k);
                scale = scale * std::abs(z) + std::abs(c(k));
            }
            worst_residual = std::max(worst_residual, std::abs(p) / scale);
        }
    }
    report(2, "1000 random polynomials", worst <= 1e-8 && worst_residual <= 1e-9,
           "distance " + fmt(worst) + ", residual/scale " + fmt(worst_residual), "1e-8 / 1e-9");
}

// ------------------------------------------------------------------ 3

// Leading exponents of the lambda-branches at +inf and -inf, read off the
// dominant balance by hand. Operators without lambda have no branches.
struct ExpectedBranches {
    const char* name;
    std::vector<Rational> plus, minus;
};

std::vector<ExpectedBranches> hand_exponents() {
    return {
        {"heat", {Rational(2)}, {Rational(2)}},                    // lambda = -xi^2
        {"backward heat", {Rational(2)}, {Rational(2)}},           // lambda = xi^2
        {"wave", {Rational(1), Rational(1)}, {Rational(1), Rational(1)}},  // lambda = +-i xi
        {"schroedinger", {Rational(2)}, {Rational(2)}},            // lambda = -i xi^2
        {"shifted", {Rational(0)}, {Rational(0)}},                 // lambda = 3
        {"shifted schroedinger", {Rational(2)}, {Rational(2)}},    // lambda = -i xi^2 + 1
        {"transport", {Rational(1)}, {Rational(1)}},               // lambda = -i xi
        {"degenerate", {Rational(-1)}, {Rational(-1)}},            // lambda = i / xi
        {"hormander", {Rational(2)}, {Rational(2)}},               // lambda = -i (xi + 1)^2
        {"cubic", {Rational(3, 2)}, {Rational(3, 2)}},             // lambda^2 = i xi^3
    };
}

std::vector<Rational> leading_exponents(const OperatorSymbol& P, Direction d) {
    std::vector<Rational> out;
    // one entry per branch; a ramified branch carries all of its sheets
    for (const auto& b : puiseux_branches(P, d, 8)) out.push_back(b.terms.empty() ? Rational(0) : b.terms[0].exponent);
    std::sort(out.begin(), out.end());
    return out;
}

std::string join(const std::vector<Rational>& v) {
    std::string s = "{";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k].str();
    return s + "}";
}

void puiseux() {
    std::map<std::string, OperatorSymbol> ops;
    for (const auto& e : corpus::operators()) ops.emplace(e.name, e.P);
    int mismatches = 0;
    for (const auto& h : hand_exponents()) {
        const auto& P = ops.at(h.name);
        for (auto [dir, want] : {std::pair{Direction::plus_infinity, h.plus}, std::pair{Direction::minus_infinity, h.minus}}) {
            auto w = want;
            std::sort(w.begin(), w.end());
            const auto got = leading_exponents(P, dir);
            if (got != w) {
                ++mismatches;
                detail(std::string(h.name) + " " + to_string(dir) + ": got " + join(got) + ", expected " + join(w));
            }
        }
    }

    // Residual |P(lambda_k(xi), i xi)| of the k-term partial sum against the
    // predicted power xi^r; slope fitted over the samples above rounding.
    double worst_dev = 0.0;
    int fitted = 0;
    // The corpus symbols mostly have terminating expansions, so a few longer
    // ones are added to exercise nonzero residuals.
    std::vector<std::pair<std::string, OperatorSymbol>> residual_set;
    for (const auto& e : corpus::operators()) residual_set.emplace_back(e.name, e.P);
    for (const char* s : {"d0^2 + i*d1^3 + d1", "d0^3 - d1^2*d0 + i*d1 + 1", "d0^2 - 2*i*d1*d0 - d1^4 + d1",
                          "d0^2 + 2*d0 - d1^2", "(d0 - d1^2)*(d0 + i*d1) - 1", "d0^4 + d1^4 + i*d1^3*d0"})
        residual_set.emplace_back(s, parse_operator(s, 1));
    for (const auto& [name, P] : residual_set) {
        bool has_lambda = false;
        for (const auto& [ex, c] : P.terms()) has_lambda |= ex[0] > 0;
        if (!has_lambda) continue;
        for (const auto& b : puiseux_branches(P, Direction::plus_infinity, 8)) {
            for (std::size_t k = 1; k <= b.terms.size(); ++k) {
                const auto& r = b.residual_exponent[k];
                if (!r) continue;
                std::vector<double> lx, ly;
                for (int j = 4; j <= 12; ++j) {
                    const long double xi = std::ldexp(1.0L, j);
                    const Complex lam = b.evaluate(0, static_cast<double>(xi), k);
                    const std::complex<long double> L{lam.real(), lam.imag()};
                    const auto val = eval_symbol<long double>(P, L, std::vector<long double>{xi});
                    long double mag = 0.0L;
                    for (const auto& [ex, c] : P.terms())
                        mag += std::abs(c) * std::pow(std::abs(L), static_cast<long double>(ex[0])) *
                               std::pow(xi, static_cast<long double>(ex[1]));
                    if (std::abs(val) <= 1e-12L * mag) continue;
                    lx.push_back(std::log(static_cast<double>(xi)));
                    ly.push_back(std::log(static_cast<double>(std::abs(val))));
                }
                if (lx.size() < 4) continue;
                double mx = 0, my = 0;
                for (std::size_t i = 0; i < lx.size(); ++i) {
                    mx += lx[i] / lx.size();
                    my += ly[i] / ly.size();
                }
                double sxy = 0, sxx = 0;
                for (std::size_t i = 0; i < lx.size(); ++i) {
                    sxy += (lx[i] - mx) * (ly[i] - my);
                    sxx += (lx[i] - mx) * (lx[i] - mx);
                }
                const double dev = std::abs(sxy / sxx - r->to_double());
                if (dev > 0.1) detail(name + " k=" + std::to_string(k) + ": slope " + fmt(sxy / sxx, "%.4f") +
                                      ", predicted " + r->str());
                worst_dev = std::max(worst_dev, dev);
                ++fitted;
            }
        }
    }
    report(3, "Puiseux exponents and residual powers", mismatches == 0 && fitted > 0 && worst_dev <= 0.1,
           std::to_string(mismatches) + " exponent mismatches, max |slope - predicted| " + fmt(worst_dev, "%.4f") +
               " over " + std::to_string(fitted) + " partial sums",
           "0 mismatches, 0.1");
}

// ------------------------------------------------------------------ 4

std::optional<double> brute_sigma(const OperatorSymbol& P, double r, int points) {
    std::optional<double> best;
    for (int k = 0; k < points; ++k) {
        const double xi = -r + 2.0 * r * k / (points - 1);
        const auto s = lambda_slice(P, v1(xi));
        if (s.degree() < 1) continue;
        for (const Complex& l : oracle::companion_roots(s.coeffs))
            if (std::norm(l) + xi * xi <= 0.5 * r * r && (!best || l.real() > *best)) best = l.real();
    }
    return best;
}

void sigma_curves() {
    SamplerConfig cfg;
    cfg.budget = 20000;
    double worst_drop = 0.0;
    for (const auto& e : corpus::operators()) {
        std::optional<double> last;
        for (double r : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const auto s = sigma_of_r(e.P, r, cfg);
            if (s.sigma && last) worst_drop = std::max(worst_drop, *last - *s.sigma);
            if (s.sigma) last = s.sigma;
        }
    }
    double worst = 0.0;
    int presence = 0;
    for (const char* op : {"d0 - d1^2", "d0^2 - d1^2", "d0 - 3", "d0 - i*(d1+1)^2"}) {
        const auto P = parse_operator(op, 1);
        for (double r : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const auto ours = sigma_of_r(P, r, cfg);
            const auto ref = brute_sigma(P, r, 100000);
            if (ours.sigma.has_value() != ref.has_value()) {
                ++presence;
                continue;
            }
            if (ref) worst = std::max(worst, std::abs(*ours.sigma - *ref));
        }
    }
    report(4, "sigma(r) monotone and against brute force",
           worst_drop <= 1e-9 && presence == 0 && worst <= 1e-3,
           "max decrease " + fmt(worst_drop) + ", max oracle gap " + fmt(worst) + ", " + std::to_string(presence) +
               " definedness mismatches",
           "1e-9 / 1e-3");
}

// ------------------------------------------------------------------ 5 - 8

const OperatorSymbol heat = parse_operator("d0 - d1^2", 1);
const OperatorSymbol wave = parse_operator("d0^2 - d1^2", 1);
const OperatorSymbol transport = parse_operator("d0 + d1", 1);
const OperatorSymbol shifted = parse_operator("d0 - 3", 1);

double worst_delta(const OperatorSymbol& P, double sigma) {
    double w = 0.0;
    for (const auto& d : verify_delta_property(P, sigma, gaussian_suite()))
        w = std::max({w, d.residual, d.residual_multiplied});
    return w;
}

void delta_property() {
    const double a = std::max({worst_delta(heat, 1.0), worst_delta(wave, 1.0), worst_delta(transport, 1.0)});
    const double b = worst_delta(shifted, 4.0);
    report(5, "delta property", a <= 1e-3 && b <= 1e-6,
           "heat/wave/transport " + fmt(a) + ", d0-3 " + fmt(b), "1e-3 / 1e-6");
}

double worst_shift(const OperatorSymbol& P, double base) {
    double w = 0.0;
    for (const auto& phi : gaussian_suite()) {
        w = std::max(w, verify_sigma_independence(P, base + 0.5, base + 1.0, phi));
        w = std::max(w, verify_sigma_independence(P, base + 0.5, base + 2.0, phi));
    }
    return w;
}

void sigma_independence() {
    const double a = std::max({worst_shift(heat, 0.0), worst_shift(wave, 0.0), worst_shift(transport, 0.0)});
    const double b = worst_shift(shifted, 3.0);
    report(6, "sigma independence over three shifts", a <= 1e-4 && b <= 1e-6,
           "heat/wave/transport " + fmt(a) + ", d0-3 " + fmt(b), "1e-4 / 1e-6 relative");
}

void support() {
    double worst = 0.0;
    for (const auto& e : corpus::operators()) {
        if (e.expected != Classification::bounded) continue;
        const double sigma = std::max(e.omega0, 0.0) + 1.0;
        for (double v : verify_support(e.P, sigma, {-0.5, -1.0, -2.0})) worst = std::max(worst, v);
    }
    report(7, "support in the past", worst <= 1e-6, fmt(worst), "1e-6");
}

void decay() {
    const auto at4 = verify_decay(shifted, 4.0, 4.0);
    const auto at2 = verify_decay(shifted, 4.0, 2.0);
    detail("lambda=4: tail rate " + fmt(at4.tail_rate, "%.4f") + ", full-range rate " + fmt(at4.rate, "%.4f"));
    detail("lambda=2: tail rate " + fmt(at2.tail_rate, "%.4f") + ", full-range rate " + fmt(at2.rate, "%.4f"));
    double lo = 2.0, hi = 4.0;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (verify_decay(shifted, 4.0, mid).tail_rate < 0.0 ? hi : lo) = mid;
    }
    const double flip = 0.5 * (lo + hi);
    const bool pass = std::abs(at4.tail_rate + 1.0) <= 0.05 && std::abs(at2.tail_rate - 1.0) <= 0.05 &&
                      std::abs(flip - 3.0) <= 0.05;
    report(8, "decay trichotomy for d0-3", pass,
           "rate(4) " + fmt(at4.tail_rate, "%.4f") + ", rate(2) " + fmt(at2.tail_rate, "%.4f") + ", flip at " +
               fmt(flip, "%.4f"),
           "-1 +- 0.05, +1 +- 0.05, 3 +- 0.05");
}

// ------------------------------------------------------------------ 9

void grid() {
    GridSpec s;
    s.freq_extent = 32.0;
    s.points = 512;
    s.sigma = 1.0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto N = build_fundamental_solution(heat, s);
    const double elapsed = seconds_since(t0);
    const double err = std::abs(N.at(v2(1.0, 0.0)) - 1.0 / std::sqrt(4.0 * M_PI));

    // the CLI's default right-hand side: a Gaussian bump at (1.5, 0), widths 0.4
    GridField F{s, FieldRole::rhs, std::vector<Complex>(s.size()), 0.0};
    for (std::size_t i = 0; i < F.values.size(); ++i) {
        const VectorXd x = F.point(i);
        F.values[i] = std::exp(-0.5 * (std::pow((x(0) - 1.5) / 0.4, 2) + std::pow(x(1) / 0.4, 2)));
    }
    const double residual = convolution_solve(heat, F).residual;
    report(9, "grid heat kernel and convolution solve", err <= 2e-3 && elapsed <= 120.0 && residual <= 1e-3,
           "kernel error " + fmt(err) + " in " + fmt(elapsed, "%.2f") + " s, solve residual " + fmt(residual),
           "2e-3 within 120 s / 1e-3");
}

// ------------------------------------------------------------------ 10

void log_region() {
    SamplerConfig cfg;
    cfg.budget = 100000;
    const auto none = check_log_region(heat, {1.0, 1.0}, cfg);
    const auto hormander = parse_operator("d0 - i*(d1+1)^2", 1);
    const auto viol = check_log_region(hormander, {0.0, 1.0}, cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : viol) best = std::min(best, std::abs(eval_symbol(hormander, v.lambda, v.xi)));
    report(10, "log region", none.empty() && !viol.empty() && best <= 1e-8,
           std::to_string(none.size()) + " heat violations, " + std::to_string(viol.size()) +
               " Hormander witnesses, best |P| " + fmt(best),
           "0 violations, a witness with |P| <= 1e-8");
}

// ------------------------------------------------------------------ 11

std::string capture(const std::string& cmd) {
    std::unique_ptr<FILE, int (*)(FILE*)> p(popen(cmd.c_str(), "r"), pclose);
    if (!p) return {};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p.get())) > 0) out.append(buf.data(), n);
    return out;
}

void determinism(const std::string& evolv) {
    int differ = 0, runs = 0;
    for (const char* op : {"d0 - i*d1^2 - 1", "d0 - i*(d1+1)^2", "d0^2 - d1^2"}) {
        const std::string base = "'" + evolv + "' analyze '" + op + "' --seed 7";
        const std::string a = capture(base), b = capture(base), c = capture(base + " --threads 1");
        runs += 3;
        if (a.empty() || a != b || a != c) ++differ;
    }
    report(11, "byte-identical analyze reports", differ == 0,
           std::to_string(differ) + " differing operators over " + std::to_string(runs) + " runs", "0");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-evolv>\n", argv[0]);
        return 2;
    }
    const std::vector<std::pair<int, std::function<void()>>> steps{
        {1, verdicts}, {2, random_roots}, {3, puiseux}, {4, sigma_curves}, {5, delta_property}, {6, sigma_independence},
        {7, support}, {8, decay}, {9, grid}, {10, log_region}, {11, [&] { determinism(argv[1]); }},
    };
    for (const auto& [id, run] : steps) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run();
        } catch (const std::exception& e) {
            report(id, "exception", false, e.what(), "-");
        }
        detail("(" + fmt(seconds_since(t0), "%.1f") + " s)");
    }
    std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
