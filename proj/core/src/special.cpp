#include "evglm/special.hpp"

#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace evglm {

long double digamma_l(long double x) { return boost::math::digamma(x); }
long double trigamma_l(long double x) { return boost::math::trigamma(x); }

double normal_quantile(double u) { return -M_SQRT2 * boost::math::erfc_inv(2.0 * u); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

double poisson_cdf(double y, double lambda) {
  if (y < 0) return 0.0;
  return boost::math::gamma_q(std::floor(y) + 1.0, lambda);
}

double poisson_sf(double y, double lambda) {
  if (y < 0) return 1.0;
  return boost::math::gamma_p(std::floor(y) + 1.0, lambda);
}

double binomial_cdf(double y, int m, double p) {
  if (y < 0) return 0.0;
  if (y >= m) return 1.0;
  double k = std::floor(y);
  return boost::math::ibetac(k + 1.0, m - k, p);
}

double binomial_sf(double y, int m, double p) {
  if (y < 0) return 1.0;
  if (y >= m) return 0.0;
  double k = std::floor(y);
  return boost::math::ibeta(k + 1.0, m - k, p);
}

}  // namespace evglm
