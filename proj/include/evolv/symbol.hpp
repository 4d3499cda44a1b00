#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "evolv/types.hpp"

namespace evolv {

// Sparse polynomial P(d0, d1, ..., dn) with complex coefficients.
//
// The symbol is obtained by the substitution d0 -> lambda, dk -> i*xi_k.
// Terms with zero coefficient are never stored, so two symbols compare equal
// exactly when their term maps agree.
class OperatorSymbol {
public:
    using TermMap = std::map<Exponents, Complex>;

    explicit OperatorSymbol(int n = 0);

    static OperatorSymbol constant(int n, Complex c);
    // d_k as an operator on R^{1+n}; k = 0 is the evolution variable.
    static OperatorSymbol variable(int n, int k);

    int dim() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Degree in d0 (0 for the zero operator).
    int lambda_degree() const;
    // Total degree in the spatial variables d1..dn.
    int spatial_degree() const;
    bool depends_on_lambda() const { return lambda_degree() > 0; }
    double coefficient_scale() const;

    // Adds c to the coefficient of the given monomial, dropping it if it cancels.
    void add_term(const Exponents& e, Complex c);

    OperatorSymbol pow(int k) const;

    friend OperatorSymbol operator+(const OperatorSymbol& a, const OperatorSymbol& b);
    friend OperatorSymbol operator-(const OperatorSymbol& a, const OperatorSymbol& b);
    friend OperatorSymbol operator*(const OperatorSymbol& a, const OperatorSymbol& b);
    friend OperatorSymbol operator*(Complex c, const OperatorSymbol& a);
    OperatorSymbol operator-() const;

    friend bool operator==(const OperatorSymbol&, const OperatorSymbol&) = default;

private:
    int n_;
    TermMap terms_;
};

// Error raised by the operator grammar; `position` is a 0-based byte offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Parses the operator grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' integer)?
//   primary := number | 'i' | 'd' digits | '(' expr ')'
// When `n` is empty the dimension is the largest variable index used (at least 1).
OperatorSymbol parse_operator(std::string_view text, std::optional<int> n = std::nullopt);

// Canonical text form; parse_operator(to_string(P), P.dim()) == P.
std::string to_string(const OperatorSymbol& P);

// Exact JSON intake: {"n": int, "terms": [{"exp": [...], "re": x, "im": y}, ...]}.
OperatorSymbol operator_from_json(const nlohmann::json& j);
nlohmann::json operator_to_json(const OperatorSymbol& P);

// P(lambda, i*xi) with the coefficient sum evaluated term by term.
template <class T>
std::complex<T> eval_symbol(const OperatorSymbol& P, std::complex<T> lambda, const std::vector<T>& xi) {
    std::complex<T> sum{0, 0};
    const std::complex<T> iu{0, 1};
    for (const auto& [e, c] : P.terms()) {
        std::complex<T> t{static_cast<T>(c.real()), static_cast<T>(c.imag())};
        for (int p = 0; p < e[0]; ++p) t *= lambda;
        for (std::size_t k = 1; k < e.size(); ++k)
            for (int p = 0; p < e[k]; ++p) t *= iu * xi[k - 1];
        sum += t;
    }
    return sum;
}

Complex eval_symbol(const OperatorSymbol& P, Complex lambda, const VectorXd& xi);

// P frozen at a real xi: sum_k Q_k(i xi) lambda^k.
struct LambdaPolynomial {
    VectorXcd coeffs;  // c_0 .. c_m, trailing exact zeros trimmed
    VectorXd frozen_xi;

    bool is_zero() const { return coeffs.size() == 0; }
    // -1 marks the zero polynomial.
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

LambdaPolynomial lambda_slice(const OperatorSymbol& P, const VectorXd& xi);

template <class Scalar, class Derived>
Scalar horner(const Eigen::MatrixBase<Derived>& c, Scalar z) {
    Scalar acc{0};
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * z + Scalar(c(k));
    return acc;
}

// Coefficients of the univariate polynomial xi -> P(lambda, i*xi) restricted to
// a single spatial axis (n = 1): result(a, b) is the coefficient of lambda^a xi^b.
MatrixXcd bivariate_coefficients(const OperatorSymbol& P);

}  // namespace evolv
