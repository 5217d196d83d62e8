#pragma once

namespace evglm {

long double digamma_l(long double x);
long double trigamma_l(long double x);

/// Standard normal quantile and tail functions.
double normal_quantile(double u);
double normal_cdf(double x);

/// Poisson cdf P(Y <= y) and upper tail P(Y > y) for integer y >= 0.
double poisson_cdf(double y, double lambda);
double poisson_sf(double y, double lambda);

/// Binomial(m, p) cdf P(Y <= y) and upper tail P(Y > y).
double binomial_cdf(double y, int m, double p);
double binomial_sf(double y, int m, double p);

}  // namespace evglm
