#include <algorithm>
#include <cmath>
#include <limits>

#include "evolv/optimize.hpp"
#include "evolv/puiseux.hpp"
#include "evolv/roots.hpp"

namespace evolv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VectorXd vec1(double x) {
    VectorXd v(1);
    v(0) = x;
    return v;
}

// Roots of Q_a(i xi) as a polynomial in xi (row a of the bivariate table).
std::vector<Complex> xi_roots(const MatrixXcd& B, Eigen::Index a) {
    VectorXcd c = B.row(a).transpose();
    if (c.cwiseAbs().maxCoeff() == 0.0) return {};
    return polynomial_roots(c).roots;
}

std::vector<double> real_roots(const std::vector<Complex>& r) {
    std::vector<double> out;
    for (const Complex& z : r)
        if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z))) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

double abscissa(const OperatorSymbol& P, double xi, Complex* argmax = nullptr) {
    const auto slice = lambda_slice(P, vec1(xi));
    if (slice.is_zero()) return kInf;
    RootSet rs;
    try {
        rs = roots(slice);
    } catch (const RootNotConverged& e) {
        rs = e.best();
    }
    double best = -kInf;
    for (const Complex& r : rs.roots) {
        if (r.real() > best) {
            best = r.real();
            if (argmax) *argmax = r;
        }
    }
    return best;
}

EvidenceRecord witness_sequence(const OperatorSymbol& P, const PuiseuxBranch& b) {
    EvidenceRecord rec;
    rec.kind = "witness_sequence";
    rec.summary = "max Re of the lambda-roots along the unbounded branch";
    for (int k = 1; k <= 4; ++k) {
        const double step = std::pow(10.0, b.center ? -k : k);
        const double sg = b.direction == Direction::plus_infinity ? 1.0 : -1.0;
        rec.xi.push_back((b.center ? *b.center : 0.0) + sg * step);
    }
    rec.value = abscissa(P, rec.xi.back());
    return rec;
}

// Outcome of classifying a set of branches: 0 bounded, 1 unbounded, 2 open.
struct BranchScan {
    int state = 0;
    double limit = -kInf;
    std::vector<EvidenceRecord> evidence;
};

BranchScan scan(const OperatorSymbol& P, const std::vector<PuiseuxBranch>& branches, const std::string& kind) {
    BranchScan s;
    for (const auto& b : branches) {
        const BranchClass bc = classify_branch(b);
        EvidenceRecord rec;
        rec.kind = kind;
        rec.summary = b.summary() + " -> " + to_string(bc.behaviour);
        if (bc.behaviour == BranchBehaviour::unbounded_above) {
            rec.summary += " (sheet " + std::to_string(bc.witness_sheet) + ")";
            s.evidence.push_back(rec);
            s.evidence.push_back(witness_sequence(P, b));
            s.state = 1;
            return s;
        }
        if (bc.behaviour == BranchBehaviour::needs_deeper) s.state = 2;
        else {
            rec.value = bc.limit;
            s.limit = std::max(s.limit, bc.limit);
        }
        s.evidence.push_back(rec);
    }
    return s;
}

PetrovskiiVerdict lambda_free(const OperatorSymbol& P) {
    PetrovskiiVerdict v;
    v.method = VerdictMethod::exact_1d;
    if (P.is_zero()) {
        v.classification = Classification::unbounded;
        v.omega0 = kInf;
        v.evidence.push_back({"zero_slice", "P vanishes identically; every lambda is a root", {0.0}, std::nullopt, kInf});
        return v;
    }
    const MatrixXcd B = bivariate_coefficients(P);
    const auto zeros = real_roots(xi_roots(B, 0));
    if (!zeros.empty()) {
        v.classification = Classification::unbounded;
        v.omega0 = kInf;
        v.evidence.push_back({"zero_slice", "P(lambda, i xi) vanishes for all lambda at a real xi", {zeros.front()},
                              std::nullopt, kInf});
        return v;
    }
    v.classification = Classification::bounded;
    v.omega0 = -kInf;
    v.evidence.push_back({"no_roots", "P does not involve lambda and has no real zero in xi", {}, std::nullopt, -kInf});
    return v;
}

}  // namespace

PetrovskiiVerdict petrovskii_verdict_exact_1d(const OperatorSymbol& P, const ExactOptions& opts) {
    if (P.dim() != 1) throw std::invalid_argument("the exact verdict needs n = 1");
    if (!P.depends_on_lambda()) return lambda_free(P);

    PetrovskiiVerdict v;
    v.method = VerdictMethod::exact_1d;
    const MatrixXcd B = bivariate_coefficients(P);
    const Eigen::Index m = B.rows() - 1;

    // Degenerate points: real zeros of the leading coefficient.
    const auto degenerate = real_roots(xi_roots(B, m));
    for (double xs : degenerate) {
        bool all = true;
        for (Eigen::Index a = 0; a <= m && all; ++a) {
            Complex val = 0.0;
            double scale = 0.0;
            for (Eigen::Index b = B.cols() - 1; b >= 0; --b) {
                val = val * xs + B(a, b);
                scale = scale * std::abs(xs) + std::abs(B(a, b));
            }
            all = std::abs(val) <= 1e-9 * scale;
        }
        if (all) {
            v.classification = Classification::unbounded;
            v.omega0 = kInf;
            v.evidence.push_back({"zero_slice", "every coefficient vanishes: all lambda are roots", {xs}, std::nullopt, kInf});
            return v;
        }
    }

    double branch_limit = -kInf;
    bool open = false;
    auto run = [&](auto&& make, const std::string& kind) -> bool {
        int depth = opts.depth;
        while (true) {
            PuiseuxOptions po;
            po.depth = depth;
            const BranchScan s = scan(P, make(po), kind);
            if (s.state == 1) {
                v.classification = Classification::unbounded;
                v.omega0 = kInf;
                v.evidence.insert(v.evidence.end(), s.evidence.begin(), s.evidence.end());
                return true;
            }
            if (s.state == 0 || depth >= opts.max_depth) {
                if (s.state == 2) open = true;
                branch_limit = std::max(branch_limit, s.limit);
                v.evidence.insert(v.evidence.end(), s.evidence.begin(), s.evidence.end());
                return false;
            }
            depth = std::min(2 * depth, opts.max_depth);
        }
    };
    for (Direction d : {Direction::plus_infinity, Direction::minus_infinity})
        if (run([&](const PuiseuxOptions& po) { return puiseux_branches(P, d, po); }, "branch")) return v;
    for (double xs : degenerate)
        for (Direction side : {Direction::plus_infinity, Direction::minus_infinity})
            if (run([&](const PuiseuxOptions& po) { return local_puiseux_branches(P, xs, side, po); }, "local_branch"))
                return v;

    // Finite part: every breakpoint of the coefficient polynomials lies inside.
    double brk = 0.0, lead = 0.0;
    for (Eigen::Index a = 0; a <= m; ++a)
        for (const Complex& z : xi_roots(B, a)) brk = std::max(brk, std::abs(z));
    for (const Complex& z : xi_roots(B, m)) lead = std::max(lead, std::abs(z));
    const double Xi = 2.0 * (1.0 + brk + lead);

    const int N = std::max(opts.samples, 3) | 1;
    std::vector<double> xs(static_cast<std::size_t>(N)), fs(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        xs[static_cast<std::size_t>(k)] = -Xi + 2.0 * Xi * k / (N - 1);
        fs[static_cast<std::size_t>(k)] = abscissa(P, xs[static_cast<std::size_t>(k)]);
    }
    for (double xd : degenerate) {
        xs.push_back(xd);
        fs.push_back(abscissa(P, xd));
    }
    double best = -kInf, bestx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (fs[k] > best) {
            best = fs[k];
            bestx = xs[k];
        }
    // refine around the largest local maxima of the grid
    std::vector<int> peaks;
    for (int k = 0; k < N; ++k) {
        const double f = fs[static_cast<std::size_t>(k)];
        const bool left = k == 0 || f >= fs[static_cast<std::size_t>(k - 1)];
        const bool right = k == N - 1 || f >= fs[static_cast<std::size_t>(k + 1)];
        if (left && right && std::isfinite(f)) peaks.push_back(k);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return fs[static_cast<std::size_t>(a)] > fs[static_cast<std::size_t>(b)]; });
    if (peaks.size() > 8) peaks.resize(8);
    const double h = 2.0 * Xi / (N - 1);
    for (int k : peaks) {
        const double c = xs[static_cast<std::size_t>(k)];
        const auto g = golden_maximize([&](double x) { return abscissa(P, x); }, c - h, c + h, 1e-12 * Xi, 200);
        if (g.value > best) {
            best = g.value;
            bestx = g.x;
        }
    }
    // tails beyond the compact interval
    double tail = -kInf, tailx = 0.0;
    for (double sg : {1.0, -1.0}) {
        for (double x = Xi; x <= 1e4 * Xi; x *= 1.05) {
            Complex r;
            const double f = abscissa(P, sg * x, &r);
            if (f > tail) {
                tail = f;
                tailx = sg * x;
            }
            if (std::abs(r) > 1e6) break;
        }
    }
    Complex lam;
    abscissa(P, bestx, &lam);
    v.evidence.push_back({"finite_sup", "sup of a(xi) on [-" + std::to_string(Xi) + ", " + std::to_string(Xi) + "]",
                          {bestx}, lam, best});
    v.evidence.push_back({"tail_sup", "largest a(xi) sampled beyond the compact interval", {tailx}, std::nullopt, tail});

    if (open) {
        v.classification = Classification::undetermined;
        v.evidence.push_back({"needs_deeper", "branch expansion exhausted the depth cap before deciding", {}, std::nullopt, std::nullopt});
        return v;
    }
    const double w = std::max({best, tail, branch_limit}) + 0.0;  // no negative zero
    v.classification = Classification::bounded;
    v.omega0 = w;
    v.omega0_error = std::isfinite(w) ? 1e-9 * (1.0 + std::abs(w)) : 0.0;
    return v;
}

}  // namespace evolv
