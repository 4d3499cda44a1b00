#include <doctest.h>

#include <cmath>
#include <random>

#include "evolv/symbol.hpp"
#include "evolv/test_function.hpp"

using namespace evolv;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double d : v) x(k++) = d;
    return x;
}

Complex coeff(const OperatorSymbol& P, Exponents e) {
    auto it = P.terms().find(e);
    return it == P.terms().end() ? Complex{} : it->second;
}

OperatorSymbol random_symbol(std::mt19937_64& rng, int n, int max_deg, int terms) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::normal_distribution<double> g;
    OperatorSymbol P(n);
    for (int t = 0; t < terms; ++t) {
        Exponents e(n + 1);
        for (auto& v : e) v = deg(rng);
        P.add_term(e, Complex{g(rng), g(rng)});
    }
    return P;
}

// Random grammar strings for the round-trip corpus.
std::string random_expression(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    const int k = pick(rng);
    if (depth == 0 || k < 3) {
        switch (pick(rng) % 5) {
            case 0: return "d0";
            case 1: return "d1";
            case 2: return "i";
            case 3: return "2.5";
            default: return "3";
        }
    }
    const std::string a = random_expression(rng, depth - 1);
    const std::string b = random_expression(rng, depth - 1);
    switch (k % 5) {
        case 0: return a + " + " + b;
        case 1: return a + " - " + b;
        case 2: return a + "*" + b;
        case 3: return "(" + a + ")^" + std::to_string(pick(rng) % 3);
        default: return "-(" + a + ")";
    }
}

}  // namespace

TEST_CASE("parse: direct syntax mapping") {
    const auto heat = parse_operator("d0 - d1^2", 1);
    CHECK(heat.terms().size() == 2);
    CHECK(coeff(heat, {1, 0}) == Complex{1, 0});
    CHECK(coeff(heat, {0, 2}) == Complex{-1, 0});

    const auto wave = parse_operator("d0^2 - d1^2", 1);
    CHECK(coeff(wave, {2, 0}) == Complex{1, 0});
    CHECK(coeff(wave, {0, 2}) == Complex{-1, 0});
}

TEST_CASE("parse: expansion of Hormander's operator") {
    // -i (d1^2 + 2 d1 + 1), expanded by hand.
    const auto P = parse_operator("d0 - i*(d1+1)^2", 1);
    CHECK(P.terms().size() == 4);
    CHECK(coeff(P, {1, 0}) == Complex{1, 0});
    CHECK(coeff(P, {0, 2}) == Complex{0, -1});
    CHECK(coeff(P, {0, 1}) == Complex{0, -2});
    CHECK(coeff(P, {0, 0}) == Complex{0, -1});
}

TEST_CASE("parse: errors carry positions") {
    try {
        parse_operator("d0 - * d1", 1);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS(parse_operator("d0 + d2", 1), ParseError);
    CHECK_THROWS_AS(parse_operator("d0^1.5", 1), ParseError);
    CHECK_THROWS_AS(parse_operator("d0^-1", 1), ParseError);
    CHECK_THROWS_AS(parse_operator("(d0 + 1", 1), ParseError);
    CHECK_THROWS_AS(parse_operator("2d0", 1), ParseError);
    CHECK_THROWS_AS(parse_operator("x", 1), ParseError);
    CHECK(parse_operator("d3").dim() == 3);
    CHECK(parse_operator("1").dim() == 1);
    CHECK(parse_operator("d0 - 3", 0).dim() == 0);
}

TEST_CASE("parse: print then parse is idempotent on a 50-string corpus") {
    std::vector<std::string> corpus = {
        "d0 - d1^2", "d0^2 - d1^2", "d0 - i*(d1+1)^2", "d1*d0 + 1", "d1", "1", "d0 - 3",
        "d0 + d1", "d0 - i*d1^2 - 1", "d0^2 + i*d1^3", "0.125*d0 - 1e-3*d1", "(1 + 2*i)*(d0 - d1)^3",
        "-(d0 + i)^2", "0", "d0 - d0",
    };
    std::mt19937_64 rng(7);
    while (corpus.size() < 50) corpus.push_back(random_expression(rng, 4));
    for (const auto& s : corpus) {
        CAPTURE(s);
        const auto P = parse_operator(s, 1);
        const auto text = to_string(P);
        CAPTURE(text);
        CHECK(parse_operator(text, 1) == P);
        CHECK(to_string(parse_operator(text, 1)) == text);
    }
}

TEST_CASE("operator JSON intake") {
    const auto j = nlohmann::json::parse(R"({"n": 1, "terms": [{"exp": [2, 0], "re": 1}, {"exp": [0, 3], "re": -1, "im": 0}]})");
    const auto P = operator_from_json(j);
    CHECK(P == parse_operator("d0^2 - d1^3", 1));
    CHECK(operator_from_json(operator_to_json(P)) == P);
    CHECK_THROWS(operator_from_json(nlohmann::json::parse(R"({"n": 1, "terms": [{"exp": [1]}]})")));
}

TEST_CASE("eval_symbol examples") {
    const auto heat = parse_operator("d0 - d1^2", 1);
    CHECK(std::abs(eval_symbol(heat, Complex{-4, 0}, vec({2}))) == doctest::Approx(0.0));
    const auto wave = parse_operator("d0^2 - d1^2", 1);
    CHECK(eval_symbol(wave, Complex{1, 0}, vec({1})).real() == doctest::Approx(2.0));
    // Root lambda(xi) = -2 xi + i (1 - xi^2) at xi = 1.
    const auto horm = parse_operator("d0 - i*(d1+1)^2", 1);
    CHECK(std::abs(eval_symbol(horm, Complex{-2, 0}, vec({1}))) < 1e-14);
}

TEST_CASE("lambda_slice examples") {
    const auto heat = parse_operator("d0 - d1^2", 1);
    const auto s = lambda_slice(heat, vec({3}));
    REQUIRE(s.degree() == 1);
    CHECK(s.coeffs(0) == Complex{9, 0});
    CHECK(s.coeffs(1) == Complex{1, 0});

    const auto deg = lambda_slice(parse_operator("d1*d0 + 1", 1), vec({0}));
    REQUIRE(deg.degree() == 0);
    CHECK(deg.coeffs(0) == Complex{1, 0});

    const auto wave = lambda_slice(parse_operator("d0^2 - d1^2", 1), vec({2}));
    REQUIRE(wave.degree() == 2);
    CHECK(wave.coeffs(0) == Complex{4, 0});
    CHECK(wave.coeffs(1) == Complex{0, 0});
    CHECK(wave.coeffs(2) == Complex{1, 0});

    const auto zero = lambda_slice(parse_operator("d1", 1), vec({0}));
    CHECK(zero.is_zero());
    CHECK(zero.degree() == -1);
}

TEST_CASE("eval_symbol agrees with Horner on the slice for random triples") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> dims(0, 3);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = dims(rng);
        const auto P = random_symbol(rng, n, 4, 6);
        const Complex lambda{g(rng), g(rng)};
        VectorXd xi(n);
        for (int k = 0; k < n; ++k) xi(k) = g(rng);
        const Complex direct = eval_symbol(P, lambda, xi);
        const auto slice = lambda_slice(P, xi);
        const Complex viaSlice = slice.is_zero() ? Complex{} : horner(slice.coeffs, lambda);
        CHECK(std::abs(direct - viaSlice) <= 1e-12 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("apply_operator examples") {
    const auto phi = TestFunction::unit_gaussian(2);
    // -d0 e^{-|x|^2/2} = x0 e^{-|x|^2/2}
    CHECK(apply_operator(parse_operator("d0", 1), true, phi, vec({1, 0})).real() == doctest::Approx(std::exp(-0.5)));
    // (-d0 - d1^2) phi = (x0 - x1^2 + 1) phi
    CHECK(apply_operator(parse_operator("d0 - d1^2", 1), true, phi, vec({0, 0})).real() == doctest::Approx(1.0));
    const auto shifted = TestFunction::gaussian(vec({0.3, -0.2}), vec({0.7, 1.3}));
    const VectorXd p = vec({0.1, 0.4});
    CHECK(apply_operator(parse_operator("1", 1), false, shifted, p).real() == doctest::Approx(shifted.value(p)));
}

TEST_CASE("apply_operator of a product equals composition") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 40; ++trial) {
        const auto P = random_symbol(rng, 1, 2, 3);
        const auto Q = random_symbol(rng, 1, 2, 3);
        const TestFunction phi(vec({g(rng), g(rng)}), vec({0.8, 1.2}), {trial % 3, 1});
        const bool flip = trial % 2 == 0;
        const auto composed = apply_operator_expansion(Q, flip, apply_operator_expansion(P, flip, phi));
        for (int s = 0; s < 5; ++s) {
            const VectorXd x = vec({g(rng), g(rng)});
            const Complex direct = apply_operator(P * Q, flip, phi, x);
            const Complex viaComposition = evaluate(composed, x);
            CHECK(std::abs(direct - viaComposition) <= 1e-10 * (1.0 + std::abs(direct)));
        }
    }
}

TEST_CASE("closed-form Fourier extension matches quadrature") {
    // 1-d members with complex frequency, against a fine trapezoid rule.
    for (int m = 0; m < 4; ++m) {
        const TestFunction phi(vec({0.7}), vec({0.4}), {m});
        for (Complex zeta : {Complex{0.0, 0.0}, Complex{2.0, 1.5}, Complex{-3.0, -0.5}}) {
            Complex integral = 0.0;
            const double h = 1e-3;
            for (double x = -8.0; x <= 9.4; x += h)
                integral += std::exp(-kI * x * zeta) * phi.value(vec({x})) * h;
            VectorXcd z(1);
            z(0) = zeta;
            CHECK(std::abs(phi.fourier(z) - integral) < 1e-9 * (1.0 + std::abs(integral)));
        }
    }
}

TEST_CASE("effective support radius") {
    const auto phi = TestFunction::gaussian(vec({0.0, 0.0}), vec({0.5, 2.0}));
    // e^{-u^2/2} = 1e-16 at u = sqrt(2 ln 1e16) ~ 8.58
    CHECK(phi.support_radius(0) == doctest::Approx(0.5 * 8.58).epsilon(0.01));
    CHECK(phi.support_radius(1) == doctest::Approx(2.0 * 8.58).epsilon(0.01));
    const TestFunction h(vec({0.0}), vec({1.0}), {6});
    CHECK(h.support_radius(0) > 8.58);
    CHECK_THROWS(TestFunction::gaussian(vec({0.0}), vec({0.0})));
}
