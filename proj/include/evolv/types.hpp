#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace evolv {

using Complex = std::complex<double>;

using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

// Exponent tuple of a monomial in (d0, d1, ..., dn).
using Exponents = std::vector<int>;

inline constexpr Complex kI{0.0, 1.0};

}  // namespace evolv
