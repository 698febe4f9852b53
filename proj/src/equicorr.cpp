#include "maxtail/equicorr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "maxtail/quadrature.hpp"
#include "maxtail/special.hpp"

namespace maxtail {

namespace {

constexpr double kQuadTol = 5e-11;   // quadrature error target
constexpr double kTailTarget = 1e-13;  // per-tail certified truncation

// Smallest s with phi(s)/s <= kTailTarget, so each discarded tail of an
// integrand dominated by phi is certified below the target.
double base_truncation_point() {
    static const double s_star = [] {
        double lo = 1.0, hi = 50.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (mills_upper(mid) <= kTailTarget ? hi : lo) = mid;
        }
        return hi;
    }();
    return s_star;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

QuadratureResult run_certified(const std::function<double(double)>& f,
                               double lo, double hi, double truncation) {
    IntegrationResult r = integrate_adaptive(f, lo, hi, kQuadTol);
    QuadratureResult out;
    out.value = clamp01(r.value);
    out.truncation_bound = truncation;
    out.abs_error_bound = r.error_estimate + truncation;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    return out;
}

}  // namespace

double threshold(std::int64_t n, double delta0, double rho0) {
    if (n < 2) {
        throw std::domain_error("threshold: requires n >= 2");
    }
    if (!(delta0 > 0.0 && delta0 < 1.0) || !(rho0 > 0.0 && rho0 < 1.0)) {
        throw std::domain_error(
            "threshold: delta0 and rho0 must lie in (0, 1)");
    }
    return delta0 *
           std::sqrt(2.0 * (1.0 - rho0) * std::log(static_cast<double>(n)));
}

double epsilon0_equivalent(double delta0, double rho0) {
    return delta0 * std::sqrt(1.0 - rho0);
}

ThresholdSpec ThresholdSpec::parametric(std::int64_t n, double delta0,
                                        double rho0) {
    ThresholdSpec spec;
    spec.t_ = threshold(n, delta0, rho0);
    spec.parametric_ = true;
    return spec;
}

ThresholdSpec ThresholdSpec::raw(double t) {
    if (!std::isfinite(t)) {
        throw std::domain_error("ThresholdSpec: t must be finite");
    }
    ThresholdSpec spec;
    spec.t_ = t;
    return spec;
}

double integrand_psi(std::int64_t n, double rho, double t, double s) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw std::domain_error("integrand_psi: rho must lie in (0, 1)");
    }
    if (n < 1) {
        throw std::domain_error("integrand_psi: requires n >= 1");
    }
    const double u = (t - std::sqrt(rho) * s) / std::sqrt(1.0 - rho);
    const double log_value =
        log_std_normal_pdf(s) + static_cast<double>(n) * log_std_normal_cdf(u);
    return std::exp(log_value);
}

QuadratureResult lower_tail_exact(std::int64_t n, double rho, double t) {
    if (n < 1) {
        throw std::domain_error("lower_tail_exact: requires n >= 1");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::domain_error("lower_tail_exact: rho must lie in [0, 1]");
    }
    if (!std::isfinite(t)) {
        throw std::domain_error("lower_tail_exact: t must be finite");
    }
    if (rho == 0.0) {
        QuadratureResult out;
        out.value =
            clamp01(std::exp(static_cast<double>(n) * log_std_normal_cdf(t)));
        out.abs_error_bound = 4e-15 * (1.0 + out.value);
        return out;
    }
    if (rho == 1.0) {
        QuadratureResult out;
        out.value = clamp01(std_normal_cdf(t));
        out.abs_error_bound = 4e-15;
        return out;
    }

    const double s_star = base_truncation_point();
    // Phi^n(u(s)) transitions from ~0 to ~1 around u ~ sqrt(2 log n);
    // when that happens at s below -s_star, widen the left endpoint so
    // the bulk of psi is resolved rather than truncated away.
    const double u_tr =
        -std_normal_quantile(std::min(0.5, 0.75 / static_cast<double>(n)));
    const double s_tr = (t - std::sqrt(1.0 - rho) * u_tr) / std::sqrt(rho);
    const double left = std::max(s_star, -s_tr + 8.0);
    const double truncation = mills_upper(left) + mills_upper(s_star);

    auto f = [n, rho, t](double s) { return integrand_psi(n, rho, t, s); };
    return run_certified(f, -left, s_star, truncation);
}

QuadratureResult small_ball_exact(std::int64_t n, double rho, double t) {
    if (n < 1) {
        throw std::domain_error("small_ball_exact: requires n >= 1");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::domain_error("small_ball_exact: rho must lie in [0, 1)");
    }
    if (t <= 0.0) {
        return QuadratureResult{};  // the event is empty
    }
    if (rho == 0.0) {
        QuadratureResult out;
        const double two_sided = -2.0 * std_normal_upper_tail(t);
        out.value = clamp01(
            std::exp(static_cast<double>(n) * std::log1p(two_sided)));
        out.abs_error_bound = 4e-15 * (1.0 + out.value);
        return out;
    }

    const double sq_rho = std::sqrt(rho);
    const double sq_c = std::sqrt(1.0 - rho);
    auto f = [n, sq_rho, sq_c, t](double s) {
        const double u_hi = (t - sq_rho * s) / sq_c;
        const double u_lo = (-t - sq_rho * s) / sq_c;
        const double log_hi = log_std_normal_cdf(u_hi);
        const double log_lo = log_std_normal_cdf(u_lo);
        const double gap = log_lo - log_hi;  // <= 0
        const double log_window =
            log_hi + std::log1p(-std::exp(gap));
        return std::exp(log_std_normal_pdf(s) +
                        static_cast<double>(n) * log_window);
    };
    const double s_star = base_truncation_point();
    const double truncation = 2.0 * mills_upper(s_star);
    return run_certified(f, -s_star, s_star, truncation);
}

namespace {

// Bisect P(t) = target on [lo, hi]; P must be nondecreasing in t.
double bisect_for_probability(const std::function<double(double)>& prob,
                              double lo, double hi, double target,
                              double ptol, const char* what) {
    double p_lo = prob(lo);
    double p_hi = prob(hi);
    if (!(p_lo < target && p_hi > target)) {
        // widen once, then give up
        lo -= 20.0;
        hi += 20.0;
        p_lo = prob(lo);
        p_hi = prob(hi);
        if (!(p_lo < target && p_hi > target)) {
            throw std::runtime_error(std::string(what) +
                                     ": bracket does not straddle the target");
        }
    }
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double p = prob(mid);
        if (std::fabs(p - target) <= ptol) return mid;
        if (p < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * (1.0 + std::fabs(mid))) break;
    }
    return mid;
}

}  // namespace

double median_exact(std::int64_t n, double rho) {
    if (n < 1) {
        throw std::domain_error("median_exact: requires n >= 1");
    }
    const double top =
        std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::int64_t>(n, 2)))) +
        10.0;
    auto prob = [n, rho](double t) { return lower_tail_exact(n, rho, t).value; };
    return bisect_for_probability(prob, -10.0, top, 0.5, 1e-9, "median_exact");
}

double median_absmax_exact(std::int64_t n, double rho) {
    if (n < 1) {
        throw std::domain_error("median_absmax_exact: requires n >= 1");
    }
    const double top =
        std::sqrt(2.0 * std::log(2.0 * static_cast<double>(n))) + 10.0;
    auto prob = [n, rho](double t) {
        return t <= 0.0 ? 0.0 : small_ball_exact(n, rho, t).value;
    };
    return bisect_for_probability(prob, 1e-12, top, 0.5, 1e-9,
                                  "median_absmax_exact");
}

Moments moments_exact(std::int64_t n, double rho) {
    if (n < 1) {
        throw std::domain_error("moments_exact: requires n >= 1");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::domain_error("moments_exact: rho must lie in [0, 1]");
    }
    const double dn = static_cast<double>(n);
    // density of max Z: n phi(x) Phi^{n-1}(x), integrated where it lives
    const double x_lo = std_normal_quantile(std::exp(-41.5 / dn));
    const double x_hi = std::sqrt(2.0 * (41.5 + std::log(dn))) + 1.0;
    auto density = [dn](double x) {
        return std::exp(std::log(dn) + log_std_normal_pdf(x) +
                        (dn - 1.0) * log_std_normal_cdf(x));
    };
    const double mean_z =
        integrate_adaptive([&](double x) { return x * density(x); }, x_lo,
                           x_hi, 1e-10)
            .value;
    const double var_z =
        integrate_adaptive(
            [&](double x) {
                const double d = x - mean_z;
                return d * d * density(x);
            },
            x_lo, x_hi, 1e-10)
            .value;
    Moments m;
    m.mean = std::sqrt(1.0 - rho) * mean_z;
    m.variance = rho + (1.0 - rho) * var_z;
    return m;
}

}  // namespace maxtail
