#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "evolv/fundsol.hpp"
#include "evolv/numeric.hpp"
#include "evolv/verdict.hpp"

namespace evolv::cli {

using Json = nlohmann::ordered_json;

// Finite doubles as numbers, infinities as "-inf"/"+inf", NaN as null.
Json number(double v);
Json optional_number(const std::optional<double>& v);

Json operator_json(const OperatorSymbol& P);
Json verdict_json(const PetrovskiiVerdict& v);
Json curve_json(const SigmaCurve& c, const std::optional<GrowthFit>& fit);
Json grid_json(const GridSpec& s);

// One pass/fail line: measured value against a threshold.
Json check(const std::string& name, double measured, const std::string& comparison, double threshold);

// The five-member Gaussian suite in 1+n dimensions.
std::vector<TestFunction> gaussian_suite(int n);

struct BatteryOptions {
    double sigma = 1.0;
    std::optional<double> omega0;  // finite estimate; enables the decay sign tests
    QuadratureConfig quadrature;
};

// Delta property, sigma independence, support and decay checks.
// Returns {"sigma": ..., "checks": [...], "decay": [...]}.
Json verification_battery(const OperatorSymbol& P, const BatteryOptions& opts);

// |N(x0, 0)| along x0 over the reliable subdomain, at most `max_points` samples.
Json kernel_slice(const GridField& N, int max_points = 257);

bool all_checks_pass(const Json& checks);

}  // namespace evolv::cli
