#include "evolv/puiseux.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "evolv/roots.hpp"

namespace evolv {

std::string to_string(Direction d) { return d == Direction::plus_infinity ? "+inf" : "-inf"; }

std::string to_string(BranchBehaviour b) {
    switch (b) {
        case BranchBehaviour::bounded_above: return "bounded_above";
        case BranchBehaviour::unbounded_above: return "unbounded_above";
        default: return "needs_deeper";
    }
}

namespace {

// Monomial s * x^b * y^a of the working polynomial F(x, y); `mag` accumulates
// the moduli of everything that was summed into s, so cancellation is visible.
struct BiTerm {
    int a;
    Rational b;
    Complex s;
    double mag;
};
using BiPoly = std::vector<BiTerm>;

void normalize(BiPoly& F, double drop) {
    std::sort(F.begin(), F.end(), [](const BiTerm& u, const BiTerm& v) { return u.a != v.a ? u.a < v.a : u.b < v.b; });
    BiPoly out;
    for (const auto& t : F) {
        if (!out.empty() && out.back().a == t.a && out.back().b == t.b) {
            out.back().s += t.s;
            out.back().mag += t.mag;
        } else {
            out.push_back(t);
        }
    }
    std::erase_if(out, [drop](const BiTerm& t) { return t.s == Complex{} || std::abs(t.s) <= drop * t.mag; });
    F = std::move(out);
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

std::vector<NewtonEdge> hull_edges(const BiPoly& F) {
    std::map<int, Rational> top;
    for (const auto& t : F) {
        auto [it, ins] = top.try_emplace(t.a, t.b);
        if (!ins && it->second < t.b) it->second = t.b;
    }
    std::vector<std::pair<int, Rational>> pts(top.begin(), top.end());
    std::vector<std::pair<int, Rational>> h;
    for (const auto& p : pts) {
        while (h.size() >= 2) {
            const auto& o = h[h.size() - 2];
            const auto& u = h.back();
            const Rational cross = Rational(u.first - o.first) * (p.second - o.second) -
                                   (u.second - o.second) * Rational(p.first - o.first);
            if (cross >= Rational(0)) h.pop_back();
            else break;
        }
        h.push_back(p);
    }
    std::vector<NewtonEdge> edges;
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
        NewtonEdge e;
        e.exponent = (h[k].second - h[k + 1].second) / Rational(h[k + 1].first - h[k].first);
        const Rational level = h[k].second + Rational(h[k].first) * e.exponent;
        for (const auto& p : pts)
            if (p.first >= h[k].first && p.first <= h[k + 1].first && p.second + Rational(p.first) * e.exponent == level)
                e.points.push_back(p);
        edges.push_back(std::move(e));
    }
    std::reverse(edges.begin(), edges.end());
    return edges;
}

BiPoly initial_at_infinity(const OperatorSymbol& P, Direction dir) {
    if (P.dim() != 1) throw std::invalid_argument("branch expansions need n = 1");
    if (!P.depends_on_lambda()) throw NoLambdaVariable();
    const MatrixXcd B = bivariate_coefficients(P);
    const double sign = dir == Direction::plus_infinity ? 1.0 : -1.0;
    BiPoly F;
    for (Eigen::Index a = 0; a < B.rows(); ++a)
        for (Eigen::Index b = 0; b < B.cols(); ++b)
            if (B(a, b) != Complex{})
                F.push_back({static_cast<int>(a), Rational(b), B(a, b) * std::pow(sign, static_cast<double>(b)), std::abs(B(a, b))});
    return F;
}

// xi = center + side / x: Taylor shift of every Q_a to the center.
BiPoly initial_local(const OperatorSymbol& P, double center, Direction side) {
    if (P.dim() != 1) throw std::invalid_argument("branch expansions need n = 1");
    if (!P.depends_on_lambda()) throw NoLambdaVariable();
    const MatrixXcd B = bivariate_coefficients(P);
    const double sg = side == Direction::plus_infinity ? 1.0 : -1.0;
    BiPoly F;
    for (Eigen::Index a = 0; a < B.rows(); ++a) {
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
            Complex s = 0.0;
            double mag = 0.0;
            for (Eigen::Index b = j; b < B.cols(); ++b) {
                const double w = binomial(static_cast<int>(b), static_cast<int>(j)) * std::pow(center, static_cast<double>(b - j));
                s += B(a, b) * w;
                mag += std::abs(B(a, b)) * std::abs(w);
            }
            if (mag > 0.0) F.push_back({static_cast<int>(a), Rational(-j), s * std::pow(sg, static_cast<double>(j)), mag});
        }
    }
    return F;
}

struct Expander {
    PuiseuxOptions opts;
    Direction dir;
    std::optional<double> center;
    std::vector<PuiseuxBranch> out;

    void emit(const std::vector<PuiseuxTerm>& terms, const std::vector<std::optional<Rational>>& res, int Q, int mult,
              bool exact, bool deeper) {
        PuiseuxBranch b;
        b.direction = dir;
        b.center = center;
        b.ramification = Q;
        b.multiplicity = mult;
        b.terms = terms;
        b.exact = exact;
        b.needs_deeper = deeper;
        b.residual_exponent = res;
        out.push_back(std::move(b));
    }

    void expand(BiPoly F, std::vector<PuiseuxTerm> terms, std::vector<std::optional<Rational>> res,
                std::optional<Rational> upper, int Q, int mult) {
        normalize(F, opts.drop);
        std::optional<Rational> r;
        int amin = std::numeric_limits<int>::max();
        for (const auto& t : F) {
            amin = std::min(amin, t.a);
            if (t.a == 0 && (!r || *r < t.b)) r = t.b;
        }
        res.push_back(r);
        if (F.empty()) amin = mult;
        const int zeros = std::min(amin, mult);
        if (zeros > 0) emit(terms, res, Q, zeros, true, false);
        const int remaining = mult - zeros;
        if (remaining <= 0) return;
        if (static_cast<int>(terms.size()) >= opts.depth) {
            emit(terms, res, Q, remaining, false, true);
            return;
        }
        int covered = 0;
        for (const auto& edge : hull_edges(F)) {
            if (upper && !(edge.exponent < *upper)) continue;
            const Rational eq = edge.exponent * Rational(Q);
            const int qn = static_cast<int>(eq.den());
            const int alo = edge.points.front().first;
            const int deg = edge.length() / qn;
            VectorXcd R = VectorXcd::Zero(deg + 1);
            for (const auto& t : F) {
                if (t.a < alo || (t.a - alo) % qn != 0 || (t.a - alo) / qn > deg) continue;
                for (const auto& p : edge.points)
                    if (p.first == t.a && p.second == t.b) R((t.a - alo) / qn) += t.s;
            }
            const auto w = polynomial_roots(R).roots;
            // cluster multiple roots by their mean
            std::vector<std::pair<Complex, int>> groups;
            std::vector<bool> used(w.size(), false);
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (used[i]) continue;
                Complex sum = w[i];
                int cnt = 1;
                used[i] = true;
                for (std::size_t j = i + 1; j < w.size(); ++j) {
                    if (!used[j] && std::abs(w[j] - w[i]) <= opts.cluster * std::max(std::abs(w[i]), std::abs(w[j]))) {
                        used[j] = true;
                        sum += w[j];
                        ++cnt;
                    }
                }
                groups.emplace_back(sum / static_cast<double>(cnt), cnt);
            }
            for (const auto& [wr, mu] : groups) {
                const Complex c = std::pow(wr, 1.0 / qn);
                BiPoly G;
                for (const auto& t : F) {
                    Complex cp = 1.0;
                    double mp = 1.0;
                    // (c x^e + y)^a = sum_j C(a, j) c^{a-j} x^{(a-j) e} y^j
                    std::vector<Complex> cpow(static_cast<std::size_t>(t.a) + 1);
                    std::vector<double> mpow(static_cast<std::size_t>(t.a) + 1);
                    for (int k = 0; k <= t.a; ++k) {
                        cpow[static_cast<std::size_t>(k)] = cp;
                        mpow[static_cast<std::size_t>(k)] = mp;
                        cp *= c;
                        mp *= std::abs(c);
                    }
                    for (int j = 0; j <= t.a; ++j) {
                        const double bn = binomial(t.a, j);
                        const auto k = static_cast<std::size_t>(t.a - j);
                        G.push_back({j, t.b + Rational(t.a - j) * edge.exponent, t.s * bn * cpow[k], t.mag * bn * mpow[k]});
                    }
                }
                auto nt = terms;
                nt.push_back({edge.exponent, c});
                expand(std::move(G), std::move(nt), res, edge.exponent, Q * qn, mu);
            }
            covered += edge.length();
        }
        if (covered < remaining) emit(terms, res, Q, remaining - covered, false, true);
    }
};

}  // namespace

std::vector<NewtonEdge> newton_polygon(const OperatorSymbol& P, Direction dir) {
    BiPoly F = initial_at_infinity(P, dir);
    normalize(F, 0.0);
    return hull_edges(F);
}

std::vector<PuiseuxBranch> puiseux_branches(const OperatorSymbol& P, Direction dir, const PuiseuxOptions& opts) {
    if (opts.depth < 1) throw std::invalid_argument("expansion depth must be at least 1");
    Expander ex{opts, dir, std::nullopt, {}};
    ex.expand(initial_at_infinity(P, dir), {}, {}, std::nullopt, 1, P.lambda_degree());
    return std::move(ex.out);
}

std::vector<PuiseuxBranch> local_puiseux_branches(const OperatorSymbol& P, double center, Direction side,
                                                  const PuiseuxOptions& opts) {
    if (opts.depth < 1) throw std::invalid_argument("expansion depth must be at least 1");
    Expander ex{opts, side, center, {}};
    ex.expand(initial_local(P, center, side), {}, {}, std::nullopt, 1, P.lambda_degree());
    return std::move(ex.out);
}

Complex PuiseuxBranch::sheet_coefficient(int sheet, std::size_t k) const {
    const auto& t = terms.at(k);
    // exp(i 2 pi d e) with the phase reduced exactly before going to floating point
    const Rational turns = Rational(sheet) * t.exponent;
    const Rational frac = turns - Rational(turns.num() >= 0 ? turns.num() / turns.den() : -((-turns.num() + turns.den() - 1) / turns.den()));
    return t.coeff * std::polar(1.0, 2.0 * std::numbers::pi * frac.to_double());
}

Complex PuiseuxBranch::evaluate(int sheet, double xi, std::size_t nterms) const {
    double x;
    if (center) x = 1.0 / std::abs(xi - *center);
    else x = direction == Direction::plus_infinity ? xi : -xi;
    Complex sum = 0.0;
    for (std::size_t k = 0; k < std::min(nterms, terms.size()); ++k)
        sum += sheet_coefficient(sheet, k) * std::pow(x, terms[k].exponent.to_double());
    return sum;
}

std::string PuiseuxBranch::summary() const {
    std::ostringstream os;
    os.precision(6);
    if (center) os << "xi -> " << *center << (direction == Direction::plus_infinity ? "+" : "-");
    else os << "xi -> " << to_string(direction);
    os << ", q=" << ramification;
    if (multiplicity > 1) os << ", multiplicity " << multiplicity;
    os << ": [";
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k) os << ", ";
        os << "(" << terms[k].exponent << ", " << terms[k].coeff.real() << (terms[k].coeff.imag() < 0 ? "-" : "+")
           << std::abs(terms[k].coeff.imag()) << "i)";
    }
    os << "]";
    if (exact) os << " exact";
    if (needs_deeper) os << " truncated";
    return os.str();
}

BranchClass classify_branch(const PuiseuxBranch& b) {
    constexpr double kImag = 1e-10, kBorder = 1e-7;
    BranchClass out;
    out.behaviour = BranchBehaviour::bounded_above;
    out.limit = -std::numeric_limits<double>::infinity();
    bool undecided = false;
    for (int d = 0; d < b.ramification; ++d) {
        bool decided = false;
        double limit = 0.0;
        for (std::size_t k = 0; k < b.terms.size() && !decided; ++k) {
            const Complex c = b.sheet_coefficient(d, k);
            const Rational& e = b.terms[k].exponent;
            if (e > Rational(0)) {
                const double ratio = std::abs(c.real()) / std::abs(c);
                if (ratio <= kImag) continue;
                if (ratio <= kBorder) {
                    undecided = true;
                    decided = true;
                    limit = std::numeric_limits<double>::quiet_NaN();
                } else if (c.real() > 0) {
                    out.behaviour = BranchBehaviour::unbounded_above;
                    out.limit = std::numeric_limits<double>::infinity();
                    out.witness_sheet = d;
                    return out;
                } else {
                    decided = true;
                    limit = -std::numeric_limits<double>::infinity();
                }
            } else if (e == Rational(0)) {
                decided = true;
                limit = c.real();
            } else {
                decided = true;
                limit = 0.0;
            }
        }
        if (!decided) {
            // every growing term is imaginary; only an exact series pins Re down
            if (b.exact) limit = 0.0;
            else undecided = true;
        }
        if (!std::isnan(limit)) out.limit = std::max(out.limit, limit);
    }
    if (undecided) out.behaviour = BranchBehaviour::needs_deeper;
    return out;
}

}  // namespace evolv
