#include "maxtail/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxtail {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr double kHalfLog2Pi = 0.9189385332046727417803297364056176;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Mills ratio R(y) with Q(y) = phi(y) * R(y), via Laplace's continued
// fraction R(y) = 1/(y + 1/(y + 2/(y + 3/(...)))). Converges for y > 0;
// fast for the y >= 8 range we use it on. Evaluated with the modified
// Lentz algorithm.
double mills_ratio_cf(double y) {
    const double tiny = 1e-300;
    double c = y;
    double d = 0.0;
    double h = y;
    for (int k = 1; k <= 400; ++k) {
        const double ak = static_cast<double>(k);
        d = y + ak * d;
        if (d == 0.0) d = tiny;
        c = y + ak / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return 1.0 / h;
}

}  // namespace

double std_normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double log_std_normal_pdf(double x) {
    return -0.5 * x * x - kHalfLog2Pi;
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_upper_tail(double x) {
    return 0.5 * std::erfc(x / kSqrt2);
}

double log_std_normal_cdf(double x) {
    if (x < -8.0) {
        // log Phi(x) = log phi(|x|) + log R(|x|); no underflow for any x
        const double y = -x;
        return -0.5 * y * y - kHalfLog2Pi + std::log(mills_ratio_cf(y));
    }
    if (x <= 0.0) {
        return std::log(0.5 * std::erfc(-x / kSqrt2));
    }
    // log(1 - Q(x)) via log1p keeps n*logPhi accurate when Phi is near 1
    return std::log1p(-std_normal_upper_tail(x));
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
    }
    // Wichura's algorithm AS 241 (PPND16), then one Halley correction.
    const double q = p - 0.5;
    double x;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        x = q *
            (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                  67265.770927008700853) *
                     r +
                 45921.953931549871457) *
                    r +
                13731.693765509461125) *
                   r +
               1971.5909503065514427) *
                  r +
              133.14166789178437745) *
                 r +
             3.387132872796366608) /
            (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                  39307.89580009271061) *
                     r +
                 21213.794301586595867) *
                    r +
                5394.1960214247511077) *
                   r +
               687.1870074920579083) *
                  r +
              42.313330701600911252) *
                 r +
             1.0);
    } else {
        double r = (q < 0.0) ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        if (r <= 5.0) {
            r -= 1.6;
            x = (((((((7.7454501427834140764e-4 * r +
                       0.0227238449892691845833) *
                          r +
                      0.24178072517745061177) *
                         r +
                     1.27045825245236838258) *
                        r +
                    3.64784832476320460504) *
                       r +
                   5.7694972214606914055) *
                      r +
                  4.6303378461565452959) *
                     r +
                 1.42343711074968357734) /
                (((((((1.05075007164441684324e-9 * r +
                       5.475938084995344946e-4) *
                          r +
                      0.0151986665636164571966) *
                         r +
                     0.14810397642748007459) *
                        r +
                    0.68976733498510000455) *
                       r +
                   1.6763848301838038494) *
                      r +
                  2.05319162663775882187) *
                     r +
                 1.0);
        } else {
            r -= 5.0;
            x = (((((((2.01033439929228813265e-7 * r +
                       2.71155556874348757815e-5) *
                          r +
                      0.0012426609473880784386) *
                         r +
                     0.026532189526576123093) *
                        r +
                    0.29656057182850489123) *
                       r +
                   1.7848265399172913358) *
                      r +
                  5.4637849111641143699) *
                     r +
                 6.6579046435011037772) /
                (((((((2.04426310338993978564e-15 * r +
                       1.4215117583164458887e-7) *
                          r +
                      1.8463183175100546818e-5) *
                         r +
                     7.868691311456132591e-4) *
                        r +
                    0.0148753612908506148525) *
                       r +
                   0.13692988092273580531) *
                      r +
                  0.59983220655588793769) *
                     r +
                 1.0);
        }
        if (q < 0.0) x = -x;
    }
    // One Halley step against the erfc-based cdf; skipped where phi(x)
    // underflows (|x| > 36.5, i.e. p below ~3e-293).
    if (std::fabs(x) < 36.5) {
        const double f = (x > 0.0) ? (1.0 - p) - std_normal_upper_tail(x)
                                   : std_normal_cdf(x) - p;
        const double u = f / std_normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double mills_upper(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("mills_upper: requires x > 0");
    }
    return std_normal_pdf(x) / x;
}

double mills_lower(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("mills_lower: requires x > 0");
    }
    const double v = (1.0 / x - 1.0 / (x * x * x)) * std_normal_pdf(x);
    return v > 0.0 ? v : 0.0;
}

double loglog_n(std::int64_t n) {
    if (n < 1) {
        throw std::domain_error("loglog_n: requires n >= 1");
    }
    const double m = static_cast<double>(n < 3 ? 3 : n);
    return std::log(std::log(m));
}

}  // namespace maxtail
