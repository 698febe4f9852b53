#include "maxtail/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "maxtail/equicorr.hpp"
#include "maxtail/special.hpp"

namespace maxtail {

namespace {

void require_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in (0, 1)");
    }
}

BoundEvaluation not_applicable(std::string name, std::string reason) {
    BoundEvaluation be;
    be.name = std::move(name);
    be.applicable = false;
    be.reason = std::move(reason);
    be.threshold = std::numeric_limits<double>::quiet_NaN();
    be.value = std::numeric_limits<double>::quiet_NaN();
    be.log_value = std::numeric_limits<double>::quiet_NaN();
    return be;
}

}  // namespace

RateParameters rate_params(double delta0, double rho0) {
    require_unit_interval(delta0, "delta0");
    require_unit_interval(rho0, "rho0");
    RateParameters rp;
    rp.alpha0 = (1.0 - rho0) * (1.0 - delta0) * (1.0 - delta0) / rho0;
    rp.beta0 = (1.0 - rho0) * (1.0 - delta0) / rho0;
    return rp;
}

BoundEvaluation main_rate(std::int64_t n, double delta0, double rho0) {
    if (n < 3) {
        throw std::domain_error("main_rate: requires n >= 3");
    }
    const RateParameters rp = rate_params(delta0, rho0);
    const double log_n = std::log(static_cast<double>(n));
    BoundEvaluation be;
    be.name = "main_rate";
    be.kind = BoundKind::rate_no_constant;
    be.threshold = threshold(n, delta0, rho0);
    be.log_value =
        -rp.alpha0 * log_n + 0.5 * (rp.beta0 - 1.0) * std::log(log_n);
    be.value = std::exp(be.log_value);
    be.inputs = {{"n", static_cast<double>(n)},
                 {"delta0", delta0},
                 {"rho0", rho0},
                 {"alpha0", rp.alpha0},
                 {"beta0", rp.beta0}};
    return be;
}

SharpnessStudy empirical_constant(std::span<const std::int64_t> n_grid,
                                  double delta0, double rho0) {
    if (n_grid.empty()) {
        throw std::domain_error("empirical_constant: empty grid");
    }
    for (size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 3) {
            throw std::domain_error("empirical_constant: grid entries must be >= 3");
        }
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw std::domain_error(
                "empirical_constant: grid must be strictly increasing");
        }
    }
    SharpnessStudy study;
    for (const std::int64_t n : n_grid) {
        SharpnessRow row;
        row.n = n;
        row.threshold = threshold(n, delta0, rho0);
        const QuadratureResult qr = lower_tail_exact(n, rho0, row.threshold);
        row.exact = qr.value;
        row.exact_error = qr.abs_error_bound;
        const BoundEvaluation rate = main_rate(n, delta0, rho0);
        row.rate = rate.value;
        // a value at or below its own error bound carries no ratio signal
        row.flagged = !(row.exact > qr.abs_error_bound);
        row.c_hat = row.flagged ? 0.0 : row.exact / row.rate;
        study.rows.push_back(row);
    }

    double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    int m = 0;
    bool first = true;
    for (const SharpnessRow& row : study.rows) {
        if (row.flagged) {
            ++study.excluded;
            continue;
        }
        if (first) {
            study.c_min = study.c_max = row.c_hat;
            first = false;
        } else {
            study.c_min = std::min(study.c_min, row.c_hat);
            study.c_max = std::max(study.c_max, row.c_hat);
        }
        const double x = loglog_n(row.n);
        const double y = std::log(row.c_hat);
        sum_x += x;
        sum_y += y;
        sum_xx += x * x;
        sum_xy += x * y;
        ++m;
    }
    study.band_ratio = (m > 0 && study.c_min > 0.0)
                           ? study.c_max / study.c_min
                           : std::numeric_limits<double>::quiet_NaN();
    const double det = m * sum_xx - sum_x * sum_x;
    study.loglog_slope =
        (m >= 2 && std::fabs(det) > 1e-12) ? (m * sum_xy - sum_x * sum_y) / det
                                           : 0.0;
    return study;
}

BoundEvaluation borell_tis(double median, double s) {
    if (!(s > 0.0)) {
        throw std::domain_error("borell_tis: requires s > 0");
    }
    BoundEvaluation be;
    be.name = "borell_tis";
    be.threshold = median - s;
    be.log_value = -0.5 * s * s;
    be.value = std::exp(be.log_value);
    be.inputs = {{"median", median}, {"s", s}};
    return be;
}

BoundEvaluation paouris_valettas(double median, double variance, double s) {
    if (!(s > 0.0)) {
        throw std::domain_error("paouris_valettas: requires s > 0");
    }
    if (!(variance > 0.0)) {
        throw std::domain_error("paouris_valettas: requires variance > 0");
    }
    BoundEvaluation be;
    be.name = "paouris_valettas";
    be.threshold = median - s;
    be.log_value = std::log(0.5) -
                   std::numbers::pi * s * s / (1024.0 * variance);
    be.value = std::exp(be.log_value);
    be.inputs = {{"median", median}, {"variance", variance}, {"s", s}};
    return be;
}

BoundEvaluation pv_fixed_ratio(double median, double variance, double delta0) {
    require_unit_interval(delta0, "delta0");
    if (!(variance > 0.0)) {
        throw std::domain_error("pv_fixed_ratio: requires variance > 0");
    }
    if (!(median > 0.0)) {
        BoundEvaluation be = not_applicable(
            "pv_fixed_ratio", "median must be positive for s = (1-delta0)*median");
        be.inputs = {{"median", median}, {"variance", variance}, {"delta0", delta0}};
        return be;
    }
    const double s = (1.0 - delta0) * median;
    BoundEvaluation be = paouris_valettas(median, variance, s);
    be.name = "pv_fixed_ratio";
    be.threshold = delta0 * median;
    be.inputs["delta0"] = delta0;
    return be;
}

BoundEvaluation hartigan(std::int64_t n, double epsilon, double sigma_n_sq) {
    if (n < 1) {
        throw std::domain_error("hartigan: requires n >= 1");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0 / std::numbers::e)) {
        throw std::domain_error(
            "hartigan: epsilon must lie in (0, 1/e) so log log(1/eps) is "
            "positive");
    }
    if (!(sigma_n_sq > 0.0 && sigma_n_sq <= 1.0)) {
        throw std::domain_error("hartigan: sigma_n_sq must lie in (0, 1]");
    }
    const double kappa =
        2.0 * std::log(static_cast<double>(n) / std::sqrt(2.0 * std::numbers::pi)) -
        2.0 * std::log(std::log(1.0 / epsilon));
    if (kappa < 6.0) {
        BoundEvaluation be = not_applicable(
            "hartigan",
            "kappa(n, eps) = " + std::to_string(kappa) + " < 6");
        be.inputs = {{"n", static_cast<double>(n)},
                     {"epsilon", epsilon},
                     {"sigma_n_sq", sigma_n_sq},
                     {"kappa", kappa}};
        return be;
    }
    const double sigma_n = std::sqrt(sigma_n_sq);
    BoundEvaluation be;
    be.name = "hartigan";
    be.threshold = sigma_n * std::sqrt(kappa - std::log(kappa)) -
                   std::sqrt(1.0 - sigma_n_sq) *
                       std::fabs(std_normal_quantile(epsilon));
    be.value = 2.0 * epsilon;
    be.log_value = std::log(be.value);
    be.inputs = {{"n", static_cast<double>(n)},
                 {"epsilon", epsilon},
                 {"sigma_n_sq", sigma_n_sq},
                 {"kappa", kappa}};
    return be;
}

WorstcaseExponents worstcase_exponents(std::int64_t n, double delta0,
                                       double rho0) {
    if (n < 2) {
        throw std::domain_error("worstcase_exponents: requires n >= 2");
    }
    const RateParameters rp = rate_params(delta0, rho0);
    const double log_n = std::log(static_cast<double>(n));
    WorstcaseExponents we;
    we.pv_exponent = -(2.0 * std::numbers::pi / 1024.0) *
                     ((1.0 - rho0) / rho0) * (1.0 - delta0) * (1.0 - delta0) *
                     log_n;
    we.main_exponent = -rp.alpha0 * log_n;
    return we;
}

ReferenceLevel reference_level(std::int64_t n, double rho0, double c0) {
    if (n < 2) {
        throw std::domain_error("reference_level: requires n >= 2");
    }
    require_unit_interval(rho0, "rho0");
    if (c0 < 0.0) {
        throw std::domain_error("reference_level: requires c0 >= 0");
    }
    const double ref =
        std::sqrt(2.0 * (1.0 - rho0) * std::log(static_cast<double>(n)));
    return ReferenceLevel{ref - c0 * std::sqrt(loglog_n(n)), ref};
}

BoundEvaluation subset_rate(std::int64_t n_tilde, double delta0,
                            double rho_tilde) {
    if (n_tilde < 2) {
        throw std::domain_error("subset_rate: requires n_tilde >= 2");
    }
    const RateParameters rp = rate_params(delta0, rho_tilde);
    const double log_n = std::log(static_cast<double>(n_tilde));
    BoundEvaluation be;
    be.name = "subset_rate";
    be.kind = BoundKind::rate_no_constant;
    be.threshold = delta0 * std::sqrt(2.0 * (1.0 - rho_tilde) * log_n);
    be.log_value =
        -rp.alpha0 * log_n + 0.5 * (rp.beta0 - 1.0) * std::log(log_n);
    be.value = std::exp(be.log_value);
    be.inputs = {{"n_tilde", static_cast<double>(n_tilde)},
                 {"delta0", delta0},
                 {"rho_tilde", rho_tilde},
                 {"alpha0", rp.alpha0},
                 {"beta0", rp.beta0}};
    return be;
}

SmallBallRates small_ball_rates(std::int64_t n, double delta0, double rho0) {
    if (n < 3) {
        throw std::domain_error("small_ball_rates: requires n >= 3");
    }
    SmallBallRates rates;
    rates.abs_case = main_rate(2 * n, delta0, rho0);
    rates.abs_case.name = "small_ball_abs";
    rates.abs_case.inputs["n"] = static_cast<double>(n);

    const BoundEvaluation base = main_rate(n, delta0, rho0);
    rates.nonneg_case = base;
    rates.nonneg_case.name = "small_ball_nonneg";
    rates.nonneg_case.log_value = 2.0 * base.log_value;
    rates.nonneg_case.value = base.value * base.value;
    rates.nonneg_case.reason = "constant is the square of the main-rate constant";
    rates.nonneg_case.inputs["constant_power"] = 2.0;
    return rates;
}

BoundEvaluation latala_oleszkiewicz(double median_absmax, double delta0) {
    if (!(median_absmax > 0.0)) {
        throw std::domain_error(
            "latala_oleszkiewicz: requires median_absmax > 0");
    }
    if (!(delta0 > 0.0 && delta0 < 0.5)) {
        BoundEvaluation be = not_applicable("latala_oleszkiewicz",
                                            "requires delta0 in (0, 1/2)");
        be.inputs = {{"median_absmax", median_absmax}, {"delta0", delta0}};
        return be;
    }
    BoundEvaluation be;
    be.name = "latala_oleszkiewicz";
    be.threshold = delta0 * median_absmax;
    be.log_value = std::log(0.5) - 0.25 * median_absmax * median_absmax *
                                       std::log(1.0 / (2.0 * delta0));
    be.value = std::exp(be.log_value);
    be.inputs = {{"median_absmax", median_absmax}, {"delta0", delta0}};
    return be;
}

BoundEvaluation pv_small_ball(double median_absmax, double var_absmax,
                              double delta0, double c, bool c_asserted) {
    require_unit_interval(delta0, "delta0");
    if (!(median_absmax > 0.0) || !(var_absmax > 0.0) || !(c > 0.0)) {
        throw std::domain_error("pv_small_ball: inputs must be positive");
    }
    BoundEvaluation be;
    be.name = "pv_small_ball";
    be.kind = c_asserted ? BoundKind::probability_bound
                         : BoundKind::rate_no_constant;
    if (!c_asserted) be.reason = "constant c = " + std::to_string(c) +
                                 " is a placeholder, not from the literature";
    be.threshold = delta0 * median_absmax;
    be.log_value = std::log(0.5) - c * (median_absmax * median_absmax /
                                        var_absmax) *
                                       std::log(1.0 / delta0);
    be.value = std::exp(be.log_value);
    be.inputs = {{"median_absmax", median_absmax},
                 {"var_absmax", var_absmax},
                 {"delta0", delta0},
                 {"c", c}};
    return be;
}

double variance_ratio_floor(std::int64_t n, double rho0, double c1) {
    if (n < 3) {
        throw std::domain_error("variance_ratio_floor: requires n >= 3");
    }
    require_unit_interval(rho0, "rho0");
    if (!(c1 > 0.0)) {
        throw std::domain_error("variance_ratio_floor: requires c1 > 0");
    }
    return c1 / (rho0 + 1.0 / std::log(static_cast<double>(n)));
}

}  // namespace maxtail
