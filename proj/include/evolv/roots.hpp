#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "evolv/symbol.hpp"
#include "evolv/types.hpp"

namespace evolv {

struct RootSet {
    std::vector<Complex> roots;
    // max_k |p(r_k)| / sum_j |c_j| max(1, |r_k|)^j
    double residual_bound = 0.0;
    int deflated_degree = 0;
};

struct RootOptions {
    int max_iterations = 600;
    double tolerance = 1e-9;
    // Coefficients with |c_k| <= trim * max|c| count as zero at the top.
    double trim = 1e-14;
};

class RootNotConverged : public std::runtime_error {
public:
    explicit RootNotConverged(RootSet best)
        : std::runtime_error("root iteration did not converge (residual " + std::to_string(best.residual_bound) + ")"),
          best_(std::move(best)) {}
    const RootSet& best() const { return best_; }

private:
    RootSet best_;
};

// All roots of sum c_k z^k. Throws std::invalid_argument on the zero polynomial.
RootSet polynomial_roots(const VectorXcd& coeffs, const RootOptions& opts = {});
RootSet roots(const LambdaPolynomial& p, const RootOptions& opts = {});

// max_k |p(r_k)| / sum_j |c_j| max(1,|r_k|)^j over the given roots.
double scaled_residual(const VectorXcd& coeffs, const std::vector<Complex>& roots);

class AbscissaValue {
public:
    enum class Kind { finite, no_roots, all_lambda };

    static AbscissaValue finite(double v) { return AbscissaValue(Kind::finite, v); }
    static AbscissaValue no_roots() { return AbscissaValue(Kind::no_roots, -std::numeric_limits<double>::infinity()); }
    static AbscissaValue all_lambda() { return AbscissaValue(Kind::all_lambda, std::numeric_limits<double>::infinity()); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    // -inf for no_roots, +inf for all_lambda.
    double value() const { return value_; }

    friend bool operator==(const AbscissaValue&, const AbscissaValue&) = default;

private:
    AbscissaValue(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

// a(xi) = max Re of the lambda-roots of P(lambda, i xi).
AbscissaValue spectral_abscissa(const LambdaPolynomial& slice, const RootOptions& opts = {});
AbscissaValue spectral_abscissa(const OperatorSymbol& P, const VectorXd& xi, const RootOptions& opts = {});

}  // namespace evolv
