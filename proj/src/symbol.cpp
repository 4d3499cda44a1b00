#include "evolv/symbol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace evolv {

OperatorSymbol::OperatorSymbol(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("operator dimension must be nonnegative");
}

OperatorSymbol OperatorSymbol::constant(int n, Complex c) {
    OperatorSymbol P(n);
    P.add_term(Exponents(n + 1, 0), c);
    return P;
}

OperatorSymbol OperatorSymbol::variable(int n, int k) {
    if (k < 0 || k > n) throw std::out_of_range("variable index out of range");
    OperatorSymbol P(n);
    Exponents e(n + 1, 0);
    e[k] = 1;
    P.add_term(e, 1.0);
    return P;
}

int OperatorSymbol::lambda_degree() const {
    int m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, e[0]);
    return m;
}

int OperatorSymbol::spatial_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (std::size_t k = 1; k < e.size(); ++k) s += e[k];
        d = std::max(d, s);
    }
    return d;
}

double OperatorSymbol::coefficient_scale() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s = std::max(s, std::abs(c));
    return s;
}

void OperatorSymbol::add_term(const Exponents& e, Complex c) {
    if (static_cast<int>(e.size()) != n_ + 1) throw std::invalid_argument("exponent tuple has wrong length");
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == Complex{}) terms_.erase(it);
    }
}

OperatorSymbol operator+(const OperatorSymbol& a, const OperatorSymbol& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("operator dimensions differ");
    OperatorSymbol r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
}

OperatorSymbol OperatorSymbol::operator-() const { return Complex{-1.0, 0.0} * *this; }

OperatorSymbol operator-(const OperatorSymbol& a, const OperatorSymbol& b) { return a + (-b); }

OperatorSymbol operator*(Complex c, const OperatorSymbol& a) {
    OperatorSymbol r(a.n_);
    for (const auto& [e, v] : a.terms_) r.add_term(e, c * v);
    return r;
}

OperatorSymbol operator*(const OperatorSymbol& a, const OperatorSymbol& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("operator dimensions differ");
    OperatorSymbol r(a.n_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            Exponents e(ea.size());
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

OperatorSymbol OperatorSymbol::pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative operator power");
    OperatorSymbol r = constant(n_, 1.0);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

Complex eval_symbol(const OperatorSymbol& P, Complex lambda, const VectorXd& xi) {
    return eval_symbol<double>(P, lambda, std::vector<double>(xi.data(), xi.data() + xi.size()));
}

LambdaPolynomial lambda_slice(const OperatorSymbol& P, const VectorXd& xi) {
    if (xi.size() != P.dim()) throw std::invalid_argument("xi has wrong dimension");
    VectorXcd c = VectorXcd::Zero(P.lambda_degree() + 1);
    for (const auto& [e, v] : P.terms()) {
        Complex t = v;
        for (std::size_t k = 1; k < e.size(); ++k)
            for (int p = 0; p < e[k]; ++p) t *= kI * xi(static_cast<Eigen::Index>(k - 1));
        c(e[0]) += t;
    }
    Eigen::Index len = c.size();
    while (len > 0 && c(len - 1) == Complex{}) --len;
    return LambdaPolynomial{c.head(len), xi};
}

MatrixXcd bivariate_coefficients(const OperatorSymbol& P) {
    if (P.dim() != 1) throw std::invalid_argument("bivariate coefficients need n = 1");
    MatrixXcd s = MatrixXcd::Zero(P.lambda_degree() + 1, P.spatial_degree() + 1);
    for (const auto& [e, c] : P.terms()) {
        Complex ipow = 1.0;
        for (int p = 0; p < e[1]; ++p) ipow *= kI;
        s(e[0], e[1]) += c * ipow;
    }
    return s;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string monomial_text(const Exponents& e) {
    std::string s;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] == 0) continue;
        if (!s.empty()) s += "*";
        s += "d" + std::to_string(k);
        if (e[k] > 1) s += "^" + std::to_string(e[k]);
    }
    return s;
}

}  // namespace

std::string to_string(const OperatorSymbol& P) {
    if (P.is_zero()) return "0";
    std::string out;
    bool first = true;
    // Highest powers of d0 first.
    for (auto it = P.terms().rbegin(); it != P.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        const std::string mono = monomial_text(e);
        bool negative = false;
        std::string coef;
        if (c.imag() == 0.0) {
            negative = c.real() < 0;
            const double mag = std::abs(c.real());
            if (mag != 1.0 || mono.empty()) coef = format_double(mag);
        } else if (c.real() == 0.0) {
            negative = c.imag() < 0;
            const double mag = std::abs(c.imag());
            coef = mag == 1.0 ? "i" : format_double(mag) + "*i";
        } else {
            coef = "(" + format_double(c.real()) + (c.imag() < 0 ? " - " : " + ") +
                   format_double(std::abs(c.imag())) + "*i)";
        }
        std::string term = coef;
        if (!mono.empty()) term += (term.empty() ? "" : "*") + mono;
        if (first) {
            out = (negative ? "-" : "") + term;
            first = false;
        } else {
            out += (negative ? " - " : " + ") + term;
        }
    }
    return out;
}

OperatorSymbol operator_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("terms"))
        throw std::invalid_argument("operator JSON needs keys \"n\" and \"terms\"");
    const int n = j.at("n").get<int>();
    OperatorSymbol P(n);
    for (const auto& t : j.at("terms")) {
        auto e = t.at("exp").get<Exponents>();
        if (static_cast<int>(e.size()) != n + 1)
            throw std::invalid_argument("term exponent length must be n + 1");
        if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; }))
            throw std::invalid_argument("negative exponent in operator JSON");
        const double re = t.value("re", 0.0);
        const double im = t.value("im", 0.0);
        P.add_term(e, Complex{re, im});
    }
    return P;
}

nlohmann::json operator_to_json(const OperatorSymbol& P) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : P.terms()) terms.push_back({{"exp", e}, {"re", c.real()}, {"im", c.imag()}});
    return {{"n", P.dim()}, {"terms", terms}};
}

}  // namespace evolv
