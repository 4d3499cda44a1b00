#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evolv/symbol.hpp"
#include "evolv/test_function.hpp"

namespace evolv {

enum class Window { none, raised_cosine };

// Uniform frequency grid on [-Xi, Xi)^{1+n} with M points per axis and the
// matching spatial grid: spacing pi / Xi, period M pi / Xi.
struct GridSpec {
    int n = 1;
    double freq_extent = 32.0;
    int points = 512;
    double sigma = 1.0;
    Window window = Window::raised_cosine;
    double taper = 0.25;

    int axes() const { return n + 1; }
    double dxi() const { return 2.0 * freq_extent / points; }
    double spacing() const;
    double period() const { return spacing() * points; }
    // Reliable subdomain |x_k| <= period / 4.
    double reliable_extent() const { return period() / 4.0; }
    double frequency(int j) const { return (j - points / 2) * dxi(); }
    double coordinate(int k) const { return (k - points / 2) * spacing(); }
    std::size_t size() const;
    // Window profile at a frequency vector (product over axes).
    double window_at(const double* xi) const;
    void validate() const;
};

enum class FieldRole { symbol_inverse, N_sigma, N, rhs, solution };
std::string to_string(FieldRole r);
FieldRole field_role_from_string(const std::string& s);

// Values on the grid, row-major with axis 0 (x0 or xi0) varying slowest.
struct GridField {
    GridSpec spec;
    FieldRole role = FieldRole::N;
    std::vector<Complex> values;
    double min_modulus = 0.0;  // min |P| on the line, for symbol_inverse

    std::size_t index(const std::vector<int>& idx) const;
    std::vector<int> multi_index(std::size_t flat) const;
    // Spatial point of a flat index.
    VectorXd point(std::size_t flat) const;
    bool reliable(std::size_t flat) const;
    // Multilinear interpolation at a spatial point inside the grid.
    Complex at(const VectorXd& x) const;
};

class SigmaTooClose : public std::runtime_error {
public:
    explicit SigmaTooClose(double min_modulus)
        : std::runtime_error("sigma too close to spectrum"), min_modulus_(min_modulus) {}
    double min_modulus() const { return min_modulus_; }

private:
    double min_modulus_;
};

class SupportViolation : public std::runtime_error {
public:
    explicit SupportViolation(double fraction)
        : std::runtime_error("right-hand side is not supported in x0 >= 0"), fraction_(fraction) {}
    double fraction() const { return fraction_; }

private:
    double fraction_;
};

// 1 / P(sigma + i xi0, i xi) times the window. Throws SigmaTooClose when
// min |P| <= 1e-8 * coefficient scale.
GridField symbol_inverse_on_line(const OperatorSymbol& P, const GridSpec& spec, int threads = 0);

// N = e^{sigma x0} F^{-1}[windowed symbol inverse].
GridField build_fundamental_solution(const OperatorSymbol& P, const GridSpec& spec, int threads = 0);

struct QuadratureConfig {
    double tol = 1e-10;  // relative to the integral of |integrand|
    int max_levels = 6;
    long max_points = 40'000'000;
    int threads = 0;
};

struct PairingResult {
    Complex value;
    double error = 0.0;
    double sigma = 0.0;
    bool converged = true;
    long evaluations = 0;
};

// <e^{-lambda x0} N, phi> through the shifted-line formula
//   (2 pi)^{-1-n} int phi^(-xi0 + i(sigma - lambda), -xi) / P(sigma + i xi0, i xi) dxi.
// With multiply_by_symbol the 1/P factor is dropped, which pairs N with P(-d)phi.
PairingResult pair_with_test(const OperatorSymbol& P, double sigma, const TestCombination& phi,
                             const QuadratureConfig& q = {}, Complex lambda = 0.0, bool multiply_by_symbol = false);
PairingResult pair_with_test(const OperatorSymbol& P, double sigma, const TestFunction& phi,
                             const QuadratureConfig& q = {}, Complex lambda = 0.0);

// Riemann sum of field * psi over the reliable subdomain; error from a
// step-doubling comparison plus the window leakage of psi.
PairingResult pair_on_grid(const GridField& field, const OperatorSymbol& P, const TestCombination& psi);

struct DeltaResidual {
    double residual = 0.0;       // |<N, P(-d)phi> - phi(0)| through apply_operator
    double residual_multiplied;  // same through the multiplied integrand
    double error = 0.0;
};

std::vector<DeltaResidual> verify_delta_property(const OperatorSymbol& P, double sigma,
                                                 const std::vector<TestFunction>& suite, const QuadratureConfig& q = {});

double verify_sigma_independence(const OperatorSymbol& P, double sigma1, double sigma2, const TestFunction& phi,
                                 const QuadratureConfig& q = {});

// Bumps centred at (offset, 0, ...) with width |offset| / 9 in x0 and 0.5 elsewhere.
std::vector<double> verify_support(const OperatorSymbol& P, double sigma, const std::vector<double>& offsets,
                                   const QuadratureConfig& q = {});
TestFunction support_probe(int n, double offset);

struct DecayFit {
    std::vector<double> t;
    std::vector<double> log_abs;  // log |<e^{-lambda} N, phi_t>|
    double rate = 0.0;            // slope over all probes; -inf if pairings vanish
    double tail_rate = 0.0;       // slope over the upper half of the probes
};

DecayFit verify_decay(const OperatorSymbol& P, double sigma, Complex lambda, const std::vector<double>& probes = {},
                      const QuadratureConfig& q = {});

struct SolveResult {
    GridField solution;
    double residual = 0.0;  // max |P U_sigma - F_sigma| / max |F_sigma| on the reliable subdomain
};

SolveResult convolution_solve(const OperatorSymbol& P, const GridField& rhs, int threads = 0);

struct ModulusScan {
    double inf_modulus = 0.0;
    VectorXd argmin;  // (xi0, xi)
    double mu_prime = 0.0;
    std::vector<double> shell_radius, shell_min;
};

ModulusScan min_modulus_scan(const OperatorSymbol& P, double sigma, double radius, int samples);

// .gfield container: "GFIELD01", uint64 LE header length, JSON header, data.
void write_gfield(const std::string& path, const GridField& f);
GridField read_gfield(const std::string& path);

}  // namespace evolv
