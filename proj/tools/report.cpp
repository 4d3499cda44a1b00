#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace evolv::cli {

namespace {

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

Json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return v + 0.0;
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

Json operator_json(const OperatorSymbol& P) {
    Json j;
    j["text"] = to_string(P);
    j["n"] = P.dim();
    j["terms"] = Json::parse(operator_to_json(P).dump())["terms"];
    return j;
}

Json verdict_json(const PetrovskiiVerdict& v) {
    Json j;
    j["method"] = to_string(v.method);
    j["classification"] = to_string(v.classification);
    j["omega0"] = optional_number(v.omega0);
    j["omega0_error"] = optional_number(v.omega0_error);
    Json ev = Json::array();
    for (const auto& e : v.evidence) {
        Json r;
        r["kind"] = e.kind;
        r["summary"] = e.summary;
        Json xi = Json::array();
        for (double x : e.xi) xi.push_back(number(x));
        r["xi"] = xi;
        r["lambda"] = e.lambda ? Json::array({number(e.lambda->real()), number(e.lambda->imag())}) : Json(nullptr);
        r["value"] = optional_number(e.value);
        ev.push_back(r);
    }
    j["evidence"] = ev;
    return j;
}

Json curve_json(const SigmaCurve& c, const std::optional<GrowthFit>& fit) {
    Json j;
    j["config_hash"] = c.config_hash;
    Json samples = Json::array();
    for (const auto& s : c.samples) {
        Json r;
        r["r"] = number(s.r);
        r["sigma"] = optional_number(s.sigma);
        r["low_confidence"] = s.low_confidence;
        samples.push_back(r);
    }
    j["samples"] = samples;
    if (fit) {
        j["fit"] = {{"model", to_string(fit->model)}, {"rms", number(fit->rms)},
                    {"constant", number(fit->constant)}, {"log_a", number(fit->log_a)},
                    {"log_b", number(fit->log_b)}, {"power_c", number(fit->power_c)},
                    {"power_alpha", number(fit->power_alpha)}, {"samples", fit->samples}};
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

Json grid_json(const GridSpec& s) {
    return {{"n", s.n},
            {"freq_extent", number(s.freq_extent)},
            {"points", s.points},
            {"sigma", number(s.sigma)},
            {"window", s.window == Window::none ? "none" : "raised_cosine"},
            {"taper", number(s.taper)},
            {"spacing", number(s.spacing())},
            {"reliable_extent", number(s.reliable_extent())}};
}

Json check(const std::string& name, double measured, const std::string& comparison, double threshold) {
    bool pass = false;
    if (comparison == "<=") pass = measured <= threshold;
    else if (comparison == "<") pass = measured < threshold;
    else if (comparison == ">") pass = measured > threshold;
    else if (comparison == ">=") pass = measured >= threshold;
    return {{"name", name}, {"measured", number(measured)}, {"comparison", comparison},
            {"threshold", number(threshold)}, {"pass", pass}};
}

std::vector<TestFunction> gaussian_suite(int n) {
    const double c0[5] = {0.0, 0.5, -0.4, 1.0, 0.2}, c1[5] = {0.0, -0.3, 0.2, 1.0, -1.0};
    const double w0[5] = {1.0, 0.7, 0.8, 0.5, 1.2}, w1[5] = {1.0, 0.9, 0.6, 0.5, 0.8};
    std::vector<TestFunction> out;
    for (int j = 0; j < 5; ++j) {
        VectorXd c = VectorXd::Zero(n + 1), w = VectorXd::Constant(n + 1, 0.8);
        c(0) = c0[j];
        w(0) = w0[j];
        if (n >= 1) {
            c(1) = c1[j];
            w(1) = w1[j];
        }
        out.push_back(TestFunction::gaussian(c, w));
    }
    return out;
}

Json verification_battery(const OperatorSymbol& P, const BatteryOptions& opts) {
    const int n = P.dim();
    const double s = opts.sigma;
    const auto& q = opts.quadrature;
    Json checks = Json::array();

    const auto suite = gaussian_suite(n);
    const auto delta = verify_delta_property(P, s, suite, q);
    for (std::size_t k = 0; k < delta.size(); ++k) {
        const std::string tag = "[" + std::to_string(k) + "]";
        checks.push_back(check("delta_residual" + tag, delta[k].residual, "<=", 1e-3));
        checks.push_back(check("delta_residual_multiplied" + tag, delta[k].residual_multiplied, "<=", 1e-3));
    }

    double spread = 0.0;
    for (double shift : {0.5, 1.0}) spread = std::max(spread, verify_sigma_independence(P, s, s + shift, suite[1], q));
    checks.push_back(check("sigma_independence", spread, "<=", 1e-4));

    const std::vector<double> offsets{-0.5, -1.0, -2.0};
    const auto support = verify_support(P, s, offsets, q);
    for (std::size_t k = 0; k < offsets.size(); ++k)
        checks.push_back(check("support[" + format_g(offsets[k]) + "]", support[k], "<=", 1e-6));

    Json decay = Json::array();
    // Only decay above omega0 is required; growth below depends on whether the
    // probes along (t, 0) meet the support of N, so it is reported without a verdict.
    auto run_decay = [&](double lambda, const std::string& name, const std::string& cmp) {
        const auto d = verify_decay(P, s, lambda, {}, q);
        Json log_abs = Json::array();
        for (double v : d.log_abs) log_abs.push_back(number(v));
        decay.push_back({{"name", name}, {"lambda", number(lambda)}, {"t", d.t}, {"log_abs", log_abs},
                         {"rate", number(d.rate)}, {"tail_rate", number(d.tail_rate)}});
        if (!cmp.empty()) checks.push_back(check(name, d.tail_rate, cmp, 0.0));
    };
    if (opts.omega0 && std::isfinite(*opts.omega0)) {
        run_decay(*opts.omega0 + 1.0, "decay_above_omega0", "<");
        run_decay(*opts.omega0 - 1.0, "below_omega0", "");
    } else {
        run_decay(s, "decay_at_sigma", "<");
    }
    return {{"sigma", number(s)}, {"checks", checks}, {"decay", decay}};
}

Json kernel_slice(const GridField& N, int max_points) {
    const GridSpec& s = N.spec;
    const int M = s.points;
    std::vector<int> idx(static_cast<std::size_t>(s.axes()), M / 2);
    std::vector<int> rows;
    for (int k = 0; k < M; ++k)
        if (std::abs(s.coordinate(k)) <= s.reliable_extent() + 1e-12) rows.push_back(k);
    const std::size_t stride = std::max<std::size_t>(1, (rows.size() + static_cast<std::size_t>(max_points) - 1) / static_cast<std::size_t>(max_points));
    Json x0 = Json::array(), a = Json::array();
    for (std::size_t r = 0; r < rows.size(); r += stride) {
        idx[0] = rows[r];
        x0.push_back(number(s.coordinate(rows[r])));
        a.push_back(number(std::abs(N.values[N.index(idx)])));
    }
    return {{"x0", x0}, {"abs_N", a}};
}

bool all_checks_pass(const Json& checks) {
    for (const auto& c : checks)
        if (!c.at("pass").get<bool>()) return false;
    return true;
}

}  // namespace evolv::cli
