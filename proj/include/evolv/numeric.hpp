#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evolv/symbol.hpp"
#include "evolv/verdict.hpp"

namespace evolv {

struct SamplerConfig {
    std::uint64_t seed = 1;
    // Total number of slice root evaluations.
    long budget = 200000;
    int threads = 0;
    int max_level = 10;  // radii r = 2^0 .. 2^max_level
};

// FNV-1a over the sampler settings, as 16 hex digits.
std::string config_hash(const SamplerConfig& cfg);

struct SigmaSample {
    double r = 0.0;
    std::optional<double> sigma;
    Complex lambda;  // witness root
    VectorXd xi;     // witness frequency
    bool low_confidence = false;
    long evaluations = 0;
};

// sup Re lambda over roots with |lambda|^2 + |xi|^2 <= r^2 / 2, within the
// given evaluation budget. `extra_seeds` are always evaluated first.
SigmaSample sigma_of_r(const OperatorSymbol& P, double r, const SamplerConfig& cfg,
                       const std::vector<VectorXd>& extra_seeds = {});

struct SigmaCurve {
    std::vector<SigmaSample> samples;
    std::string config_hash;
};

// Radii 2^0 .. 2^max_level sharing cfg.budget; each witness seeds the next radius.
SigmaCurve sigma_curve(const OperatorSymbol& P, const SamplerConfig& cfg);

void write_csv(std::ostream& os, const SigmaCurve& curve, int n);

enum class GrowthModel { constant, logarithmic, power };
std::string to_string(GrowthModel m);

struct GrowthFit {
    GrowthModel model = GrowthModel::constant;
    double rms = 0.0;
    // every candidate, for reporting
    double constant = 0.0, rms_constant = 0.0;
    double log_a = 0.0, log_b = 0.0, rms_log = 0.0;
    double power_c = 0.0, power_alpha = 0.0, rms_power = 0.0;  // rms_power = inf if not applicable
    int samples = 0;
};

// Least-squares fits of sigma(r) against c, a + b log(1+r) and c r^alpha.
GrowthFit fit_growth(const SigmaCurve& curve);

struct LogRegion {
    double a = 0.0;
    double b = 0.0;
};

struct Violation {
    Complex lambda;
    VectorXd xi;
    double margin;  // Re lambda - (a + b log(1 + |lambda| + |xi|))
};

// Roots found inside {Re lambda > a + b log(1+|lambda|+|xi|)}.
std::vector<Violation> check_log_region(const OperatorSymbol& P, const LogRegion& region, const SamplerConfig& cfg);

struct NumericAnalysis {
    PetrovskiiVerdict verdict;
    SigmaCurve curve;
    std::optional<GrowthFit> fit;
    double compact_sup = 0.0;  // sup of a(xi) found by compactified sampling
};

NumericAnalysis analyze_numeric(const OperatorSymbol& P, const SamplerConfig& cfg = {});
inline PetrovskiiVerdict estimate_omega0(const OperatorSymbol& P, const SamplerConfig& cfg = {}) {
    return analyze_numeric(P, cfg).verdict;
}

}  // namespace evolv
