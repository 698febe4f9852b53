#pragma once

#include <cstdint>

// Standard-normal special functions with full-range tail accuracy.
//
// All functions are pure and thread-safe. log_std_normal_cdf stays finite
// and relatively accurate far into the lower tail (x ~ -37 and beyond),
// which is what makes Phi(x)^n computable for very large n.

namespace maxtail {

// (2*pi)^(-1/2) * exp(-x^2/2)
double std_normal_pdf(double x);

// log of std_normal_pdf; finite for all finite x
double log_std_normal_pdf(double x);

// Phi(x), computed via erfc so both tails keep relative accuracy
double std_normal_cdf(double x);

// Q(x) = 1 - Phi(x)
double std_normal_upper_tail(double x);

// log Phi(x). Uses a Mills-ratio continued fraction in the deep lower
// tail and a log1p-of-tail formulation for x > 0, so n*log Phi(x) is
// usable without catastrophic loss for Phi(x) near 1.
double log_std_normal_cdf(double x);

// Phi^{-1}(p) for p in (0,1); throws std::domain_error otherwise.
double std_normal_quantile(double p);

// Mills sandwich: mills_lower(x) <= 1 - Phi(x) <= mills_upper(x).
// mills_upper(x) = phi(x)/x, valid for x > 0 (domain error otherwise).
// mills_lower(x) = max((1/x - 1/x^3) * phi(x), 0); the expression is
// only positive for x > 1, hence the clamp.
double mills_upper(double x);
double mills_lower(double x);

// log(log(max(n, 3))) for n >= 1
double loglog_n(std::int64_t n);

}  // namespace maxtail
