// evolv: Petrovskii analysis and causal fundamental solutions from the command line.
//
// Exit codes: 0 bounded / success, 1 error, 2 unbounded, 3 undetermined,
// 4 sigma at or below omega0, 5 right-hand side not supported in x0 >= 0.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "charts.hpp"
#include "evolv/numeric.hpp"
#include "evolv/puiseux.hpp"
#include "evolv/sampling.hpp"
#include "report.hpp"

#ifndef EVOLV_VERSION
#define EVOLV_VERSION "0.0.0"
#endif

using namespace evolv;
using evolv::cli::Json;

namespace {

enum Exit { kOk = 0, kError = 1, kUnbounded = 2, kUndetermined = 3, kSigmaTooLow = 4, kSupport = 5 };

// Exits with a code after a diagnostic has been printed.
struct Fail {
    int code;
};

struct Common {
    std::string text;
    std::string json_path;
    std::optional<int> n;
    int threads = 0;
    std::uint64_t seed = 1;
    long budget = 200000;
    int depth = 8;
    bool timings = false;
};

class Clock {
public:
    void mark(const std::string& what) {
        const auto now = std::chrono::steady_clock::now();
        entries_[what] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    Json json() const { return entries_; }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    Json entries_ = Json::object();
};

OperatorSymbol load_operator(const Common& c) {
    if (!c.json_path.empty()) {
        if (!c.text.empty()) {
            std::cerr << "error: give either an operator string or --json, not both\n";
            throw Fail{kError};
        }
        std::ifstream in(c.json_path);
        if (!in) {
            std::cerr << "error: cannot open '" << c.json_path << "'\n";
            throw Fail{kError};
        }
        try {
            const auto P = operator_from_json(nlohmann::json::parse(in));
            if (c.n && *c.n != P.dim()) {
                std::cerr << "error: --n " << *c.n << " disagrees with n = " << P.dim() << " in " << c.json_path << "\n";
                throw Fail{kError};
            }
            return P;
        } catch (const Fail&) {
            throw;
        } catch (const std::exception& e) {
            std::cerr << "error: " << c.json_path << ": " << e.what() << "\n";
            throw Fail{kError};
        }
    }
    if (c.text.empty()) {
        std::cerr << "error: no operator given (pass a string such as \"d0 - d1^2\" or --json FILE)\n";
        throw Fail{kError};
    }
    try {
        return parse_operator(c.text, c.n);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n  " << c.text << "\n  " << std::string(e.position(), ' ') << "^\n";
        throw Fail{kError};
    }
}

void add_common(CLI::App* app, Common& c, bool sampler) {
    app->add_option("operator", c.text, "operator text, e.g. \"d0 - d1^2\"");
    app->add_option("--json", c.json_path, "read the operator from a JSON terms file");
    app->add_option("--n", c.n, "number of spatial variables")->check(CLI::NonNegativeNumber);
    app->add_option("--threads", c.threads, "worker threads (0: EVOLV_THREADS or hardware)")->check(CLI::NonNegativeNumber);
    app->add_flag("--timings", c.timings, "include wall-clock timings in the report");
    if (sampler) {
        app->add_option("--seed", c.seed, "sampler seed");
        app->add_option("--budget", c.budget, "slice root evaluations for the numeric sampler")->check(CLI::PositiveNumber);
        app->add_option("--depth", c.depth, "initial Puiseux depth")->check(CLI::Range(1, 32));
    }
}

void emit(const Json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        throw Fail{kError};
    }
    out << text;
}

void write_chart(const std::string& dir, const std::string& name, const cli::Chart& c) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) {
        std::cerr << "error: cannot write chart into '" << dir << "'\n";
        throw Fail{kError};
    }
    out << cli::render_svg(c);
}

struct VerdictPair {
    std::optional<PetrovskiiVerdict> exact;
    NumericAnalysis numeric;
    const PetrovskiiVerdict& primary() const {
        if (exact && exact->classification != Classification::undetermined) return *exact;
        return numeric.verdict;
    }
};

VerdictPair run_verdicts(const OperatorSymbol& P, const Common& c) {
    VerdictPair v;
    SamplerConfig cfg;
    cfg.seed = c.seed;
    cfg.budget = c.budget;
    cfg.threads = c.threads;
    v.numeric = analyze_numeric(P, cfg);
    if (P.dim() == 1) {
        ExactOptions o;
        o.depth = c.depth;
        v.exact = petrovskii_verdict_exact_1d(P, o);
    }
    return v;
}

int classification_exit(Classification c) {
    switch (c) {
        case Classification::bounded: return kOk;
        case Classification::unbounded: return kUnbounded;
        default: return kUndetermined;
    }
}

double default_sigma(const PetrovskiiVerdict& v) {
    const double w = v.omega0.value_or(0.0);
    return std::isfinite(w) ? w + 1.0 : 1.0;
}

// sigma from the flag or the verdict; enforces sigma > omega0 for bounded operators.
double choose_sigma(const PetrovskiiVerdict& v, const std::optional<double>& flag) {
    if (flag) {
        if (v.classification == Classification::bounded && v.omega0 && *flag <= *v.omega0) {
            std::cerr << "error: sigma " << *flag << " does not exceed omega0 = " << *v.omega0 << "\n";
            throw Fail{kSigmaTooLow};
        }
        return *flag;
    }
    if (v.classification == Classification::unbounded) {
        std::cerr << "error: the operator is not Petrovskii-bounded; pass --sigma to force a shift\n";
        throw Fail{kUnbounded};
    }
    if (v.classification == Classification::undetermined) {
        std::cerr << "error: the verdict is undetermined; pass --sigma to force a shift\n";
        throw Fail{kUndetermined};
    }
    return default_sigma(v);
}

struct GridFlags {
    std::optional<double> xi;
    std::optional<int> points;
    double taper = 0.25;

    GridSpec spec(int n, double sigma) const {
        GridSpec s;
        s.n = n;
        s.sigma = sigma;
        s.freq_extent = xi.value_or(32.0);
        s.points = points.value_or(n == 0 ? 4096 : n == 1 ? 512 : n == 2 ? 64 : 16);
        s.taper = taper;
        s.window = taper > 0.0 ? Window::raised_cosine : Window::none;
        s.validate();
        return s;
    }
};

void add_grid(CLI::App* app, GridFlags& g) {
    app->add_option("--grid-xi", g.xi, "frequency extent Xi per axis")->check(CLI::PositiveNumber);
    app->add_option("--grid-points", g.points, "points per axis (power of two)");
    app->add_option("--taper", g.taper, "raised-cosine taper fraction in (0, 0.5]; 0 disables the window")
        ->check(CLI::Range(0.0, 0.5));
}

Json header(const std::string& kind, const OperatorSymbol& P) {
    Json j;
    j["schema"] = "evolv." + kind + "/1";
    j["tool"] = {{"name", "evolv"}, {"version", EVOLV_VERSION}};
    j["operator"] = cli::operator_json(P);
    return j;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeFlags {
    Common c;
    std::optional<double> sigma;
    double log_a = 1.0, log_b = 1.0;
    bool no_battery = false;
    std::string out, csv, charts;
};

int cmd_analyze(const AnalyzeFlags& f) {
    Clock clock;
    const auto P = load_operator(f.c);
    const auto v = run_verdicts(P, f.c);
    clock.mark("verdicts_s");
    const auto& primary = v.primary();

    Json j = header("analysis-report", P);
    j["config"] = {{"seed", f.c.seed},   {"budget", f.c.budget}, {"depth", f.c.depth},
                   {"log_region", {{"a", cli::number(f.log_a)}, {"b", cli::number(f.log_b)}}},
                   {"sampler_hash", v.numeric.curve.config_hash}};
    j["classification"] = to_string(primary.classification);
    j["method"] = to_string(primary.method);
    j["omega0"] = cli::optional_number(primary.omega0);
    j["verdicts"] = {{"exact_1d", v.exact ? cli::verdict_json(*v.exact) : Json(nullptr)},
                     {"numeric", cli::verdict_json(v.numeric.verdict)}};
    if (v.exact && v.exact->classification != Classification::undetermined &&
        v.numeric.verdict.classification != Classification::undetermined &&
        v.exact->classification != v.numeric.verdict.classification)
        j["verdicts"]["disagreement"] = true;
    j["sigma_curve"] = cli::curve_json(v.numeric.curve, v.numeric.fit);
    j["compact_sup"] = cli::number(v.numeric.compact_sup);

    SamplerConfig cfg;
    cfg.seed = f.c.seed;
    cfg.budget = f.c.budget;
    cfg.threads = f.c.threads;
    const auto violations = check_log_region(P, {f.log_a, f.log_b}, cfg);
    clock.mark("log_region_s");
    Json lr = {{"a", cli::number(f.log_a)}, {"b", cli::number(f.log_b)}, {"violations", violations.size()}};
    if (!violations.empty()) {
        const auto& w = *std::max_element(violations.begin(), violations.end(),
                                          [](const Violation& x, const Violation& y) { return x.margin < y.margin; });
        Json xi = Json::array();
        for (int k = 0; k < w.xi.size(); ++k) xi.push_back(cli::number(w.xi(k)));
        lr["witness"] = {{"lambda", {cli::number(w.lambda.real()), cli::number(w.lambda.imag())}},
                         {"xi", xi},
                         {"margin", cli::number(w.margin)},
                         {"abs_P", cli::number(std::abs(eval_symbol(P, w.lambda, w.xi)))}};
    } else {
        lr["witness"] = nullptr;
    }
    j["log_region"] = lr;

    if (f.no_battery) {
        j["battery"] = {{"skipped", "disabled by --no-battery"}};
    } else if (primary.classification != Classification::bounded && !f.sigma) {
        j["battery"] = {{"skipped", "operator is not classified bounded"}};
    } else if (P.dim() > 2) {
        j["battery"] = {{"skipped", "direct quadrature is limited to n <= 2"}};
    } else {
        cli::BatteryOptions b;
        b.sigma = choose_sigma(primary, f.sigma);
        if (primary.classification == Classification::bounded && primary.omega0) b.omega0 = *primary.omega0;
        b.quadrature.threads = f.c.threads;
        try {
            j["battery"] = cli::verification_battery(P, b);
            j["battery"]["all_pass"] = cli::all_checks_pass(j["battery"]["checks"]);
        } catch (const SigmaTooClose& e) {
            std::cerr << "error: " << e.what() << " (min |P| = " << e.min_modulus() << ")\n";
            throw Fail{kSigmaTooLow};
        }
        clock.mark("battery_s");
    }
    if (f.c.timings) j["timings"] = clock.json();

    emit(j, f.out);
    if (!f.csv.empty()) {
        std::ofstream out(f.csv);
        if (!out) {
            std::cerr << "error: cannot write '" << f.csv << "'\n";
            throw Fail{kError};
        }
        write_csv(out, v.numeric.curve, P.dim());
    }
    if (!f.charts.empty()) write_chart(f.charts, "sigma_curve.svg", cli::sigma_chart(j));
    return classification_exit(primary.classification);
}

// ---------------------------------------------------------------- fundsol

struct FundsolFlags {
    Common c;
    GridFlags grid;
    std::optional<double> sigma;
    bool pair_only = false;
    std::string out = "N.gfield", report, charts;
};

int cmd_fundsol(const FundsolFlags& f) {
    Clock clock;
    const auto P = load_operator(f.c);
    const auto v = run_verdicts(P, f.c);
    const auto& primary = v.primary();
    const double sigma = choose_sigma(primary, f.sigma);
    clock.mark("verdicts_s");

    Json j = header("fundsol-report", P);
    j["classification"] = to_string(primary.classification);
    j["omega0"] = cli::optional_number(primary.omega0);
    j["sigma"] = cli::number(sigma);
    try {
        if (P.dim() <= 2) {
            cli::BatteryOptions b;
            b.sigma = sigma;
            if (primary.classification == Classification::bounded && primary.omega0) b.omega0 = *primary.omega0;
            b.quadrature.threads = f.c.threads;
            j["battery"] = cli::verification_battery(P, b);
            j["battery"]["all_pass"] = cli::all_checks_pass(j["battery"]["checks"]);
        } else {
            j["battery"] = {{"skipped", "direct quadrature is limited to n <= 2"}};
        }
        clock.mark("battery_s");
        if (f.pair_only) {
            j["field"] = nullptr;
        } else {
            const GridSpec spec = f.grid.spec(P.dim(), sigma);
            const auto N = build_fundamental_solution(P, spec, f.c.threads);
            clock.mark("grid_s");
            write_gfield(f.out, N);
            double neg = 0.0, total = 0.0;
            for (std::size_t i = 0; i < N.values.size(); ++i) {
                if (!N.reliable(i)) continue;
                const double a = std::abs(N.values[i]);
                total += a;
                if (N.point(i)(0) < -0.5) neg += a;
            }
            j["field"] = {{"path", f.out},
                          {"grid", cli::grid_json(spec)},
                          {"min_modulus", cli::number(N.min_modulus)},
                          {"checks", Json::array({cli::check("negative_time_mass", total > 0 ? neg / total : 0.0, "<=", 1e-3)})}};
            j["kernel_slice"] = cli::kernel_slice(N);
        }
    } catch (const SigmaTooClose& e) {
        std::cerr << "error: " << e.what() << " (min |P| = " << e.min_modulus() << ")\n";
        throw Fail{kSigmaTooLow};
    }
    if (f.c.timings) j["timings"] = clock.json();
    emit(j, f.report);
    if (!f.charts.empty()) {
        if (j["battery"].contains("decay")) write_chart(f.charts, "decay.svg", cli::decay_chart(j));
        if (j.contains("kernel_slice")) write_chart(f.charts, "kernel_slice.svg", cli::slice_chart(j));
    }
    return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveFlags {
    Common c;
    std::string rhs, out = "U.gfield", report;
    std::optional<double> sigma;
};

int cmd_solve(const SolveFlags& f) {
    Clock clock;
    const auto P = load_operator(f.c);
    GridField F;
    try {
        F = read_gfield(f.rhs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << f.rhs << ": " << e.what() << "\n";
        throw Fail{kError};
    }
    if (F.spec.n != P.dim()) {
        std::cerr << "error: right-hand side has n = " << F.spec.n << " but the operator has n = " << P.dim() << "\n";
        throw Fail{kError};
    }
    const auto v = run_verdicts(P, f.c);
    F.spec.sigma = choose_sigma(v.primary(), f.sigma);
    F.role = FieldRole::rhs;
    clock.mark("verdicts_s");
    Json j = header("solve-report", P);
    j["sigma"] = cli::number(F.spec.sigma);
    j["grid"] = cli::grid_json(F.spec);
    try {
        const auto r = convolution_solve(P, F, f.c.threads);
        clock.mark("solve_s");
        write_gfield(f.out, r.solution);
        j["output"] = f.out;
        j["checks"] = Json::array({cli::check("residual", r.residual, "<=", 1e-3)});
    } catch (const SupportViolation& e) {
        std::cerr << "error: " << e.what() << " (" << e.fraction() << " of the mass lies below x0 = -0.5)\n";
        throw Fail{kSupport};
    } catch (const SigmaTooClose& e) {
        std::cerr << "error: " << e.what() << " (min |P| = " << e.min_modulus() << ")\n";
        throw Fail{kSigmaTooLow};
    }
    if (f.c.timings) j["timings"] = clock.json();
    emit(j, f.report);
    return kOk;
}

// ---------------------------------------------------------------- rhs

struct RhsFlags {
    int n = 1;
    std::vector<double> center, width;
    bool zero = false;
    GridFlags grid;
    std::string out = "F.gfield";
};

int cmd_rhs(const RhsFlags& f) {
    const GridSpec spec = f.grid.spec(f.n, 1.0);
    const std::size_t A = static_cast<std::size_t>(f.n + 1);
    std::vector<double> c = f.center, w = f.width;
    if (c.empty()) {
        c.assign(A, 0.0);
        c[0] = 1.5;
    }
    if (w.empty()) w.assign(A, 0.4);
    if (c.size() != A || w.size() != A) {
        std::cerr << "error: --center and --width need " << A << " comma-separated values\n";
        throw Fail{kError};
    }
    GridField F;
    F.spec = spec;
    F.role = FieldRole::rhs;
    F.values.assign(spec.size(), 0.0);
    if (!f.zero) {
        for (std::size_t i = 0; i < F.values.size(); ++i) {
            const VectorXd x = F.point(i);
            double e = 0.0;
            for (std::size_t k = 0; k < A; ++k) e += std::pow((x(static_cast<Eigen::Index>(k)) - c[k]) / w[k], 2);
            F.values[i] = std::exp(-0.5 * e);
        }
    }
    write_gfield(f.out, F);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Petrovskii analysis and causal fundamental solutions of constant-coefficient operators", "evolv"};
    app.set_version_flag("--version", EVOLV_VERSION);
    app.require_subcommand(1);

    AnalyzeFlags af;
    auto* analyze = app.add_subcommand("analyze", "classify an operator and report omega0, sigma(r) and checks");
    add_common(analyze, af.c, true);
    analyze->add_option("--sigma", af.sigma, "line shift for the verification battery");
    analyze->add_option("--log-a", af.log_a, "log-region intercept a");
    analyze->add_option("--log-b", af.log_b, "log-region slope b")->check(CLI::NonNegativeNumber);
    analyze->add_flag("--no-battery", af.no_battery, "skip the fundamental-solution checks");
    analyze->add_option("--out", af.out, "write the JSON report here instead of stdout");
    analyze->add_option("--csv", af.csv, "write the sigma(r) curve as CSV");
    analyze->add_option("--charts", af.charts, "directory for SVG charts");

    FundsolFlags ff;
    auto* fundsol = app.add_subcommand("fundsol", "build N on a grid and run the verification battery");
    add_common(fundsol, ff.c, true);
    add_grid(fundsol, ff.grid);
    fundsol->add_option("--sigma", ff.sigma, "line shift (default omega0 + 1)");
    fundsol->add_flag("--pair-only", ff.pair_only, "skip the grid; report the pairing checks only");
    fundsol->add_option("--out", ff.out, "output .gfield path");
    fundsol->add_option("--report", ff.report, "write the JSON report here instead of stdout");
    fundsol->add_option("--charts", ff.charts, "directory for SVG charts");

    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "solve P(d) U = F by convolution with N");
    add_common(solve, sf.c, true);
    solve->add_option("--rhs", sf.rhs, "right-hand side .gfield")->required();
    solve->add_option("--sigma", sf.sigma, "line shift (default omega0 + 1)");
    solve->add_option("--out", sf.out, "output .gfield path");
    solve->add_option("--report", sf.report, "write the JSON report here instead of stdout");

    RhsFlags rf;
    auto* rhs = app.add_subcommand("rhs", "write a Gaussian (or zero) right-hand side .gfield");
    rhs->add_option("--n", rf.n, "number of spatial variables")->check(CLI::NonNegativeNumber);
    rhs->add_option("--center", rf.center, "bump centre, comma separated")->delimiter(',');
    rhs->add_option("--width", rf.width, "bump widths, comma separated")->delimiter(',');
    rhs->add_flag("--zero", rf.zero, "write an all-zero field");
    add_grid(rhs, rf.grid);
    rhs->add_option("--out", rf.out, "output .gfield path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*analyze) return cmd_analyze(af);
        if (*fundsol) return cmd_fundsol(ff);
        if (*solve) return cmd_solve(sf);
        if (*rhs) return cmd_rhs(rf);
    } catch (const Fail& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
