#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

// The catalog of lower-tail and small-ball bounds, each as an evaluable
// formula with explicit applicability conditions. Bounds whose constants
// are only known to exist are typed rate_no_constant and are verified by
// ratio-band stability, never by inventing a constant.

namespace maxtail {

struct RateParameters {
    double alpha0;  // (1-rho0)(1-delta0)^2 / rho0
    double beta0;   // (1-rho0)(1-delta0) / rho0
};

RateParameters rate_params(double delta0, double rho0);

enum class BoundKind {
    probability_bound,  // a genuine upper bound on a probability
    rate_no_constant,   // decay rate only; the constant is unspecified
};

struct BoundEvaluation {
    std::string name;
    double threshold = 0.0;
    double value = 0.0;
    double log_value = 0.0;
    BoundKind kind = BoundKind::probability_bound;
    bool applicable = true;
    std::string reason;  // why inapplicable, or a caveat
    std::map<std::string, double> inputs;
};

// n^(-alpha0) * log(n)^((beta0-1)/2) at threshold t_n, log-domain. n >= 3.
BoundEvaluation main_rate(std::int64_t n, double delta0, double rho0);

// C_hat(n) = lower_tail_exact(n, rho0, t_n) / main_rate(n) over a grid.
struct SharpnessRow {
    std::int64_t n = 0;
    double threshold = 0.0;
    double exact = 0.0;
    double exact_error = 0.0;
    double rate = 0.0;
    double c_hat = 0.0;
    bool flagged = false;  // exact at the resolution floor; excluded
};

struct SharpnessStudy {
    std::vector<SharpnessRow> rows;
    double c_min = 0.0;
    double c_max = 0.0;
    double band_ratio = 0.0;       // c_max / c_min over included rows
    double loglog_slope = 0.0;     // slope of log C_hat vs log log n
    int excluded = 0;
};

SharpnessStudy empirical_constant(std::span<const std::int64_t> n_grid,
                                  double delta0, double rho0);

// P(M <= med - s) <= exp(-s^2/2), s > 0.
BoundEvaluation borell_tis(double median, double s);

// P(M <= med - s) <= 1/2 exp(-pi s^2 / (1024 var)), s > 0.
BoundEvaluation paouris_valettas(double median, double variance, double s);

// The fixed-ratio form at threshold delta0 * med (s = (1-delta0) med).
BoundEvaluation pv_fixed_ratio(double median, double variance, double delta0);

// Threshold sigma_n sqrt(kappa - log kappa) - sqrt(1-sigma_n^2)|Phi^-1(eps)|
// with kappa(n,eps) = 2 log(n/sqrt(2 pi)) - 2 log log(1/eps); bound 2 eps.
// Requires eps in (0, 1/e) so log log(1/eps) is defined and positive;
// inapplicable when kappa < 6.
BoundEvaluation hartigan(std::int64_t n, double epsilon, double sigma_n_sq);

struct WorstcaseExponents {
    double pv_exponent;    // -(2 pi/1024)((1-rho0)/rho0)(1-delta0)^2 log n
    double main_exponent;  // -alpha0 log n; ratio main/pv = 512/pi
};

WorstcaseExponents worstcase_exponents(std::int64_t n, double delta0,
                                       double rho0);

struct ReferenceLevel {
    double lower;  // sqrt(2(1-rho0) log n) - c0 sqrt(loglog n)
    double upper;  // sqrt(2(1-rho0) log n); equicorrelated case only
};

ReferenceLevel reference_level(std::int64_t n, double rho0, double c0);

// Corollary-style rate on a low-correlation subset of size n_tilde.
BoundEvaluation subset_rate(std::int64_t n_tilde, double delta0,
                            double rho_tilde);

struct SmallBallRates {
    BoundEvaluation abs_case;    // max |R_ij| <= rho0: main rate at 2n
    BoundEvaluation nonneg_case; // R_ij in [0, rho0]: main rate squared
};

SmallBallRates small_ball_rates(std::int64_t n, double delta0, double rho0);

// P(absmax <= delta0 m) <= 1/2 exp(-m^2/4 log(1/(2 delta0))), delta0 < 1/2.
BoundEvaluation latala_oleszkiewicz(double median_absmax, double delta0);

// P(absmax <= delta0 m) <= 1/2 exp(-c (m^2/var) log(1/delta0)); the
// universal c is unspecified, so the default c = 1 yields a
// rate_no_constant evaluation unless the caller asserts c.
BoundEvaluation pv_small_ball(double median_absmax, double var_absmax,
                              double delta0, double c = 1.0,
                              bool c_asserted = false);

// 1/var[absmax] >= c1 / (rho0 + 1/log n); c1 is caller-supplied.
double variance_ratio_floor(std::int64_t n, double rho0, double c1);

}  // namespace maxtail
