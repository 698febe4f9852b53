// maxtail: lower-tail and small-ball probabilities for maxima of
// equicorrelated Gaussian vectors, the bound catalog, sharpness studies,
// Monte Carlo estimation, and Slepian comparison checks.
//
// Exit codes: 0 success, 2 config error, 3 numerical accuracy not
// reached, 4 hypothesis failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "maxtail/bounds.hpp"
#include "maxtail/corr_model.hpp"
#include "maxtail/equicorr.hpp"
#include "maxtail/json_io.hpp"
#include "maxtail/monte_carlo.hpp"
#include "maxtail/slepian.hpp"
#include "maxtail/special.hpp"

namespace {

using nlohmann::json;
using namespace maxtail;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAccuracy = 3;
constexpr int kExitHypothesis = 4;

struct CommonOpts {
    int n = 0;
    double rho0 = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> t;
    std::optional<double> delta0;
    std::string matrix_path;
    std::int64_t samples = 1000000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string format = "json";
    std::string out;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit(const CommonOpts& opts, const std::string& text) {
    if (opts.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(opts.out);
        if (!f) throw std::runtime_error("cannot open output file: " + opts.out);
        f << text;
        if (!text.empty() && text.back() != '\n') f << '\n';
    }
}

void emit_report(const CommonOpts& opts, const std::string& command,
                 json payload) {
    json report{{"schema", "gauss-maxtail/1"},
                {"command", command},
                {"payload", std::move(payload)},
                {"meta", json{{"tool", "maxtail"},
                              {"version", "1.0"},
                              {"threads", opts.threads}}}};
    emit(opts, report.dump(2));
}

CorrelationModel load_model(const CommonOpts& opts) {
    if (!opts.matrix_path.empty()) {
        return CorrelationModel::from_csv(opts.matrix_path);
    }
    if (opts.n < 1) {
        throw CLI::ValidationError("--n is required without --matrix");
    }
    if (std::isnan(opts.rho0)) {
        throw CLI::ValidationError("--rho0 is required without --matrix");
    }
    return CorrelationModel::equicorrelated(opts.n, opts.rho0);
}

double resolve_threshold(const CommonOpts& opts, const CorrelationModel& model,
                         json* payload) {
    ThresholdSpec spec = [&] {
        if (opts.t) return ThresholdSpec::raw(*opts.t);
        if (!opts.delta0) {
            throw CLI::ValidationError("exactly one of --t / --delta0 is required");
        }
        if (!model.is_equicorrelated()) {
            throw CLI::ValidationError(
                "--delta0 thresholds need an equicorrelated model; pass --t");
        }
        return ThresholdSpec::parametric(model.dim(), *opts.delta0, model.rho());
    }();
    if (payload) {
        (*payload)["t"] = spec.resolve();
        (*payload)["threshold_source"] = spec.is_parametric() ? "parametric" : "raw";
        if (spec.is_parametric()) {
            (*payload)["delta0"] = *opts.delta0;
            (*payload)["epsilon0"] = epsilon0_equivalent(*opts.delta0, model.rho());
        }
    }
    return spec.resolve();
}

void add_common_model_flags(CLI::App* cmd, CommonOpts& opts,
                            bool with_matrix = true) {
    cmd->add_option("--n", opts.n, "dimension (equicorrelated model)");
    cmd->add_option("--rho0", opts.rho0, "equicorrelation coefficient");
    if (with_matrix) {
        cmd->add_option("--matrix", opts.matrix_path,
                        "dense correlation matrix (header-free CSV)");
    }
    cmd->add_option("--out", opts.out, "write the report to a file");
    cmd->add_option("--format", opts.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

void add_threshold_flags(CLI::App* cmd, CommonOpts& opts) {
    auto* t = cmd->add_option("--t", opts.t, "raw threshold");
    auto* d = cmd->add_option("--delta0", opts.delta0,
                              "parametric threshold delta0*sqrt(2(1-rho0)log n)");
    t->excludes(d);
    d->excludes(t);
}

void add_mc_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--samples", opts.samples, "Monte Carlo sample count");
    cmd->add_option("--seed", opts.seed, "RNG seed (default 0, never wall clock)");
    cmd->add_option("--threads", opts.threads, "worker thread cap");
}

int cmd_exact(const CommonOpts& opts, bool small_ball) {
    const CorrelationModel model = load_model(opts);
    json payload{{"n", model.dim()}, {"rho0", model.rho()}};
    const double t = resolve_threshold(opts, model, &payload);
    const QuadratureResult lower = lower_tail_exact(model.dim(), model.rho(), t);
    payload["lower_tail"] = lower;
    bool converged = lower.converged;
    if (small_ball) {
        const QuadratureResult sb = small_ball_exact(model.dim(), model.rho(), t);
        payload["small_ball"] = sb;
        converged = converged && sb.converged;
    }
    emit_report(opts, "exact", payload);
    return converged ? kExitOk : kExitAccuracy;
}

int cmd_median(const CommonOpts& opts, bool force_mc) {
    const CorrelationModel model = load_model(opts);
    json payload;
    payload["dim"] = model.dim();
    if (model.is_equicorrelated()) payload["rho0"] = model.rho();
    if (model.is_equicorrelated() && !force_mc) {
        payload["method"] = "exact";
        payload["value"] = median_exact(model.dim(), model.rho());
    } else {
        payload["method"] = "monte-carlo";
        const DistributionStatistics stats = estimate_statistics(
            model, opts.samples, opts.seed, opts.threads);
        payload["value"] = stats.median.value;
        payload["estimate"] = stats.median;
    }
    emit_report(opts, "median", payload);
    return kExitOk;
}

int cmd_bound(const CommonOpts& opts, double epsilon, double c0, double c1,
              double pv_c) {
    const CorrelationModel model = load_model(opts);
    const int n = model.dim();
    json payload{{"dim", n}};
    const double t = resolve_threshold(opts, model, &payload);
    const double delta0 = opts.delta0 ? *opts.delta0 : 0.5;

    double median, variance, median_absmax;
    json inputs;
    if (model.is_equicorrelated()) {
        median = median_exact(n, model.rho());
        variance = moments_exact(n, model.rho()).variance;
        median_absmax =
            model.rho() < 1.0 ? median_absmax_exact(n, model.rho())
                              : std::numeric_limits<double>::quiet_NaN();
        inputs["source"] = "quadrature";
    } else {
        const DistributionStatistics mc =
            estimate_statistics(model, opts.samples, opts.seed, opts.threads);
        median = mc.median.value;
        variance = mc.variance.value;
        median_absmax = std::numeric_limits<double>::quiet_NaN();
        inputs["source"] = "monte-carlo";
    }
    // absmax statistics come from sampling in every case
    const DistributionStatistics absstats = estimate_statistics(
        model, opts.samples, opts.seed + 2, opts.threads,
        StatTarget::abs_maximum);
    const double var_absmax = absstats.variance.value;
    if (std::isnan(median_absmax)) median_absmax = absstats.median.value;

    inputs["median"] = median;
    inputs["variance"] = variance;
    inputs["median_absmax"] = median_absmax;
    inputs["var_absmax"] = var_absmax;
    payload["inputs"] = inputs;

    const auto ext = model.max_offdiag();
    const double rho0 =
        model.is_equicorrelated() ? model.rho()
                                  : std::max(1e-12, ext.defined ? ext.signed_max : 0.0);

    std::vector<BoundEvaluation> rows;
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            rows.push_back(fn());
        } catch (const std::exception& e) {
            BoundEvaluation be;
            be.name = name;
            be.applicable = false;
            be.reason = e.what();
            be.threshold = be.value = be.log_value =
                std::numeric_limits<double>::quiet_NaN();
            rows.push_back(be);
        }
    };

    guarded("borell_tis", [&] { return borell_tis(median, median - t); });
    guarded("paouris_valettas",
            [&] { return paouris_valettas(median, variance, median - t); });
    guarded("pv_fixed_ratio",
            [&] { return pv_fixed_ratio(median, variance, delta0); });
    guarded("hartigan", [&] {
        const double sigma_n_sq = model.residual_variances().sigma_n_sq;
        if (!(sigma_n_sq > 0.0)) {
            throw std::domain_error("sigma_n^2 = 0 (singular model)");
        }
        return hartigan(n, epsilon, sigma_n_sq);
    });
    guarded("main_rate", [&] { return main_rate(n, delta0, rho0); });
    guarded("reference_level", [&] {
        const ReferenceLevel level = reference_level(n, rho0, c0);
        BoundEvaluation be;
        be.name = "reference_level";
        be.kind = BoundKind::rate_no_constant;  // c0 is only known to exist
        be.threshold = std::numeric_limits<double>::quiet_NaN();
        be.value = level.upper;
        be.log_value = std::log(level.upper);
        be.reason = model.is_equicorrelated()
                        ? ""
                        : "upper level applies to the equicorrelated case only";
        be.inputs = {{"lower", level.lower}, {"upper", level.upper}, {"c0", c0}};
        return be;
    });
    guarded("latala_oleszkiewicz",
            [&] { return latala_oleszkiewicz(median_absmax, delta0); });
    guarded("pv_small_ball", [&] {
        return pv_small_ball(median_absmax, var_absmax, delta0, pv_c);
    });
    guarded("small_ball_abs",
            [&] { return small_ball_rates(n, delta0, rho0).abs_case; });
    guarded("small_ball_nonneg", [&] {
        if (!model.is_equicorrelated() && ext.defined) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && model.entry(i, j) < -1e-12)
                        throw std::domain_error(
                            "requires R_ij >= 0 for all i != j");
        }
        return small_ball_rates(n, delta0, rho0).nonneg_case;
    });
    payload["bounds"] = rows;

    try {
        const WorstcaseExponents we = worstcase_exponents(n, delta0, rho0);
        payload["worstcase_exponents"] = {{"pv_exponent", we.pv_exponent},
                                          {"main_exponent", we.main_exponent}};
    } catch (const std::exception& e) {
        payload["worstcase_exponents"] = {{"error", e.what()}};
    }
    try {
        const double floor_value = variance_ratio_floor(n, rho0, c1);
        payload["variance_ratio_floor"] = {{"c1", c1}, {"value", floor_value}};
    } catch (const std::exception& e) {
        payload["variance_ratio_floor"] = {{"error", e.what()}};
    }
    emit_report(opts, "bound", payload);
    return kExitOk;
}

int cmd_sharpness(const CommonOpts& opts, std::vector<std::int64_t> n_grid,
                  double delta0) {
    if (n_grid.empty()) {
        throw CLI::ValidationError("--n-grid is required");
    }
    for (size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) {
            throw CLI::ValidationError("--n-grid must be strictly increasing");
        }
    }
    if (std::isnan(opts.rho0)) {
        throw CLI::ValidationError("--rho0 is required");
    }
    const SharpnessStudy study = empirical_constant(n_grid, delta0, opts.rho0);
    bool converged = true;
    for (const SharpnessRow& row : study.rows) {
        if (!row.flagged && row.exact_error > 1e-9) converged = false;
    }
    if (opts.format == "csv") {
        std::string text = "n,threshold,exact,rate,c_hat,quad_error\n";
        for (const SharpnessRow& row : study.rows) {
            text += std::to_string(row.n) + "," + format_double(row.threshold) +
                    "," + format_double(row.exact) + "," +
                    format_double(row.rate) + "," + format_double(row.c_hat) +
                    "," + format_double(row.exact_error) + "\n";
        }
        text += "# band min=" + format_double(study.c_min) +
                " max=" + format_double(study.c_max) +
                " max_over_min=" + format_double(study.band_ratio) +
                " loglog_slope=" + format_double(study.loglog_slope) +
                " excluded=" + std::to_string(study.excluded) + "\n";
        emit(opts, text);
    } else {
        json payload{{"rho0", opts.rho0}, {"delta0", delta0}, {"study", study}};
        emit_report(opts, "sharpness", payload);
    }
    return converged ? kExitOk : kExitAccuracy;
}

int cmd_mc(const CommonOpts& opts, bool small_ball, bool with_stats) {
    const CorrelationModel model = load_model(opts);
    json payload;
    payload["dim"] = model.dim();
    if (model.is_equicorrelated()) payload["rho0"] = model.rho();
    if (opts.t || opts.delta0) {
        const double t = resolve_threshold(opts, model, &payload);
        const MonteCarloEstimate est =
            small_ball
                ? estimate_small_ball(model, t, opts.samples, opts.seed,
                                      opts.threads)
                : estimate_lower_tail(model, t, opts.samples, opts.seed,
                                      opts.threads);
        payload["kind"] = small_ball ? "small_ball" : "lower_tail";
        payload["estimate"] = est;
    } else if (!with_stats) {
        throw CLI::ValidationError("mc: pass --t/--delta0 or --stats");
    }
    if (with_stats) {
        const DistributionStatistics stats = estimate_statistics(
            model, opts.samples, opts.seed, opts.threads,
            small_ball ? StatTarget::abs_maximum : StatTarget::maximum);
        payload["statistics"] = {{"median", stats.median},
                                 {"mean", stats.mean},
                                 {"variance", stats.variance}};
    }
    emit_report(opts, "mc", payload);
    return kExitOk;
}

int cmd_slepian_check(const CommonOpts& opts, double rho_a, double rho_b) {
    CorrelationModel a = [&] {
        if (!opts.matrix_path.empty())
            return CorrelationModel::from_csv(opts.matrix_path);
        if (opts.n < 1) throw CLI::ValidationError("--n is required");
        return CorrelationModel::equicorrelated(opts.n, rho_a);
    }();
    const CorrelationModel b = CorrelationModel::equicorrelated(a.dim(), rho_b);
    json payload{{"dim", a.dim()}, {"rho_b", rho_b}};
    CommonOpts topts = opts;
    topts.rho0 = rho_b;
    const double t = resolve_threshold(topts, b, &payload);
    const ComparisonReport report =
        check_comparison(a, b, t, opts.samples, opts.seed, opts.threads);
    payload["report"] = report;
    emit_report(opts, "slepian-check", payload);
    if (report.verdict == ComparisonVerdict::hypothesis_fails) {
        return kExitHypothesis;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lower-tail and small-ball bounds for Gaussian maxima"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool flag_small_ball = false;
    bool flag_stats = false;
    bool flag_force_mc = false;
    double epsilon = 0.1;
    double c0 = 4.0;
    double c1 = 1.0;
    double pv_c = 1.0;
    double rho_a = 0.0;
    double rho_b = 0.5;
    double delta0_sharp = 0.5;
    std::vector<std::int64_t> n_grid;

    auto* exact = app.add_subcommand("exact", "quadrature-grade probabilities");
    add_common_model_flags(exact, opts, /*with_matrix=*/false);
    add_threshold_flags(exact, opts);
    exact->add_flag("--small-ball", flag_small_ball,
                    "also report P(max |X_i| <= t)");

    auto* median = app.add_subcommand("median", "median of the maximum");
    add_common_model_flags(median, opts);
    add_mc_flags(median, opts);
    median->add_flag("--mc", flag_force_mc, "force Monte Carlo");

    auto* bound = app.add_subcommand("bound", "evaluate the bound catalog");
    add_common_model_flags(bound, opts);
    add_threshold_flags(bound, opts);
    add_mc_flags(bound, opts);
    bound->add_option("--eps", epsilon, "epsilon for the Hartigan bound");
    bound->add_option("--c0", c0, "reference-level constant");
    bound->add_option("--c1", c1, "variance-ratio-floor constant");
    bound->add_option("--pv-c", pv_c, "small-ball PV constant placeholder");

    auto* sharp = app.add_subcommand("sharpness", "empirical constant study");
    add_common_model_flags(sharp, opts, /*with_matrix=*/false);
    sharp->add_option("--n-grid", n_grid, "strictly increasing n values")
        ->delimiter(',');
    sharp->add_option("--delta0", delta0_sharp, "threshold ratio delta0");

    auto* mc = app.add_subcommand("mc", "Monte Carlo estimates");
    add_common_model_flags(mc, opts);
    add_threshold_flags(mc, opts);
    add_mc_flags(mc, opts);
    mc->add_flag("--small-ball", flag_small_ball, "estimate P(max |X_i| <= t)");
    mc->add_flag("--stats", flag_stats, "also estimate median/mean/variance");

    auto* slep = app.add_subcommand("slepian-check",
                                    "verify a Slepian comparison numerically");
    add_common_model_flags(slep, opts);
    add_threshold_flags(slep, opts);
    add_mc_flags(slep, opts);
    slep->add_option("--rho-a", rho_a, "equicorrelation of the left model");
    slep->add_option("--rho-b", rho_b, "equicorrelation of the dominating model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*exact) return cmd_exact(opts, flag_small_ball);
        if (*median) return cmd_median(opts, flag_force_mc);
        if (*bound) return cmd_bound(opts, epsilon, c0, c1, pv_c);
        if (*sharp) {
            if (sharp->get_option("--format")->count() == 0) opts.format = "csv";
            return cmd_sharpness(opts, n_grid, delta0_sharp);
        }
        if (*mc) return cmd_mc(opts, flag_small_ball, flag_stats);
        if (*slep) return cmd_slepian_check(opts, rho_a, rho_b);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
