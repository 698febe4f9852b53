#pragma once

#include <cstdint>

// Quadrature-grade probabilities, medians, and moments for the
// equicorrelated Gaussian maximum, through the representation
//   M_n = sqrt(rho) Z0 + sqrt(1-rho) max_i Z_i
// which turns lower-tail and small-ball probabilities into smooth 1-D
// integrals.

namespace maxtail {

struct QuadratureResult {
    double value = 0.0;            // clamped to [0, 1]
    double abs_error_bound = 0.0;  // quadrature estimate + truncation bound
    double truncation_bound = 0.0; // certified via Mills bound on cut tails
    int evaluations = 0;
    bool converged = true;         // accuracy target reached
};

// t_n = delta0 * sqrt(2 (1-rho0) log n); n >= 2, delta0 and rho0 in (0,1).
double threshold(std::int64_t n, double delta0, double rho0);

// The abstract-style parameterization eps0 * sqrt(2 log n) is the same
// threshold with eps0 = delta0 * sqrt(1-rho0).
double epsilon0_equivalent(double delta0, double rho0);

// Threshold given either as the parametric form or as a raw value.
struct ThresholdSpec {
    static ThresholdSpec parametric(std::int64_t n, double delta0, double rho0);
    static ThresholdSpec raw(double t);
    double resolve() const { return t_; }
    bool is_parametric() const { return parametric_; }

  private:
    double t_ = 0.0;
    bool parametric_ = false;
};

// psi_n(s) = phi(s) * Phi^n((t - sqrt(rho) s)/sqrt(1-rho)), rho in (0,1),
// evaluated in the log domain so it underflows gracefully to 0.
double integrand_psi(std::int64_t n, double rho, double t, double s);

// P(M_n <= t). rho = 0 and rho = 1 short-circuit to the exact limits
// Phi(t)^n and Phi(t); otherwise adaptive quadrature over a certified
// truncation of the real line, error target 1e-10 total.
QuadratureResult lower_tail_exact(std::int64_t n, double rho, double t);

// P(max_i |X_i| <= t) for rho in [0, 1); returns 0 exactly for t <= 0.
QuadratureResult small_ball_exact(std::int64_t n, double rho, double t);

// Unique t with P(M_n <= t) = 1/2, by bisection to |P - 1/2| <= 1e-9.
double median_exact(std::int64_t n, double rho);

// Unique t > 0 with P(max_i |X_i| <= t) = 1/2, rho in [0, 1).
double median_absmax_exact(std::int64_t n, double rho);

struct Moments {
    double mean;
    double variance;
};

// mean = sqrt(1-rho) E[max Z], variance = rho + (1-rho) var[max Z];
// the iid-max moments come from 1-D quadrature. Absolute error <= 1e-8.
Moments moments_exact(std::int64_t n, double rho);

}  // namespace maxtail
