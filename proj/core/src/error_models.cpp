#include "evglm/error_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "evglm/errors.hpp"
#include "evglm/parallel.hpp"
#include "evglm/rng.hpp"
#include "evglm/special.hpp"

namespace evglm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

bool is_nonneg_integer(double y) { return y >= 0 && std::floor(y) == y && std::isfinite(y); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_u(double u, double ubar) {
  // u and ubar are carried separately; one of them may round to 1.
  if (!(u > 0 && u <= 1) || !(ubar > 0 && ubar <= 1)) {
    throw DomainError("probability must lie in (0, 1), got u=" + fmt(u));
  }
}

// GEVD (μ=0). z = 1 + ξ y/σ must be positive.
double gevd_log_density(double s, double x, double y) {
  double w = y / s;
  double z = 1.0 + x * w;
  if (!(z > 0)) return -kInf;
  double lz = std::log1p(x * w);
  return -std::log(s) - (1.0 / x + 1.0) * lz - std::exp(-lz / x);
}

ParamVec gevd_score(double s, double x, double y) {
  long double w = static_cast<long double>(y) / s;
  long double xl = x;
  long double z = 1.0L + xl * w;
  long double lz = std::log1p(xl * w);
  long double t = std::exp(-lz / xl);
  ParamVec out(2);
  out(0) = static_cast<double>((-1.0L + (1.0L + xl - t) * w / z) / s);
  out(1) = static_cast<double>((1.0L - t) * lz / (xl * xl) - (w / z) * (1.0L / xl + 1.0L - t / xl));
  return out;
}

ParamMat gevd_fisher(double s, double x) {
  long double xi = x;
  long double g2 = std::tgamma(2.0L * xi + 1.0L);
  long double g1 = std::tgamma(xi + 1.0L);
  long double gx2 = std::tgamma(xi + 2.0L);
  long double gx3 = std::tgamma(xi + 3.0L);
  long double psi = digamma_l(xi);
  long double d1 = -kEulerGamma;               // Γ'(1)
  long double d2 = trigamma_l(1.0L);           // read as ψ'(1) = π²/6
  long double a = (xi + 1.0L) * (xi + 1.0L);
  long double iss = a * g2 - 2.0L * (xi + 1.0L) * g1 + 1.0L;
  long double isx = -a * g2 + (xi * xi + 4.0L * xi + 3.0L) * g1 + (xi * xi + xi) * psi * g1 - xi * d1 - xi - 1.0L;
  long double ixx = a * g2 - 2.0L * gx3 - 2.0L * xi * psi * gx2 + 2.0L * xi * (xi + 1.0L) * d1 +
                    xi * xi * (d2 + d1 * d1) + a;
  long double x2 = xi * xi;
  ParamMat I(2, 2);
  I(0, 0) = static_cast<double>(iss / (x2 * s * s));
  I(0, 1) = I(1, 0) = static_cast<double>(isx / (x2 * xi * s));
  I(1, 1) = static_cast<double>(ixx / (x2 * x2));
  return I;
}

double gpd_log_density(double s, double x, double y) {
  if (y < 0) return -kInf;
  double w = y / s;
  if (x == 0) return -std::log(s) - w;
  double z = 1.0 + x * w;
  if (!(z > 0)) return -kInf;
  return -std::log(s) - (1.0 / x + 1.0) * std::log1p(x * w);
}

ParamVec gpd_score(double s, double x, double y) {
  double w = y / s;
  ParamVec out(2);
  if (x == 0) {
    out(0) = -1.0 / s + y / (s * s);
    out(1) = 0.5 * w * w - w;
    return out;
  }
  double z = 1.0 + x * w;
  out(0) = -1.0 / s + (1.0 + x) * y / (s * s * z);
  out(1) = std::log1p(x * w) / (x * x) - (1.0 / x + 1.0) * w / z;
  return out;
}

}  // namespace

ErrorFamily ErrorFamily::gevd() { return ErrorFamily(FamilyKind::gevd, 0, 0.0); }
ErrorFamily ErrorFamily::gpd() { return ErrorFamily(FamilyKind::gpd, 0, 0.0); }
ErrorFamily ErrorFamily::poisson() { return ErrorFamily(FamilyKind::poisson, 0, 0.0); }

ErrorFamily ErrorFamily::binomial(int m) {
  if (m < 1) throw DomainError("binomial trial count m must be >= 1, got " + std::to_string(m));
  return ErrorFamily(FamilyKind::binomial, m, 0.0);
}

ErrorFamily ErrorFamily::gauss_loc(double sd) {
  if (!(sd > 0) || !std::isfinite(sd)) throw DomainError("gauss_loc noise sd must be positive");
  return ErrorFamily(FamilyKind::gauss_loc, 0, sd);
}

ErrorFamily ErrorFamily::from_name(const std::string& name, int m, double sd) {
  if (name == "gevd") return gevd();
  if (name == "gpd") return gpd();
  if (name == "poisson") return poisson();
  if (name == "binomial") return binomial(m);
  if (name == "gauss_loc") return gauss_loc(sd);
  throw DomainError("unknown family '" + name + "'");
}

std::string ErrorFamily::name() const {
  switch (kind_) {
    case FamilyKind::gevd: return "gevd";
    case FamilyKind::gpd: return "gpd";
    case FamilyKind::poisson: return "poisson";
    case FamilyKind::binomial: return "binomial";
    case FamilyKind::gauss_loc: return "gauss_loc";
  }
  return "?";
}

std::vector<std::string> ErrorFamily::param_names() const {
  switch (kind_) {
    case FamilyKind::gevd:
    case FamilyKind::gpd: return {"sigma", "xi"};
    case FamilyKind::poisson: return {"lambda"};
    case FamilyKind::binomial: return {"p"};
    case FamilyKind::gauss_loc: return {"location"};
  }
  return {};
}

std::string ErrorFamily::domain_text() const {
  switch (kind_) {
    case FamilyKind::gevd: return "sigma > 0, xi in (-1/2, 0) or (0, inf)";
    case FamilyKind::gpd: return "sigma > 0, xi > -1/2";
    case FamilyKind::poisson: return "lambda > 0";
    case FamilyKind::binomial: return "p in (0, 1)";
    case FamilyKind::gauss_loc: return "location real";
  }
  return "";
}

void ErrorFamily::require_theta(const ParamVec& theta) const {
  if (theta.size() != k()) {
    throw DimensionError(name() + ": parameter needs length " + std::to_string(k()) + ", got " +
                         std::to_string(theta.size()));
  }
}

double ErrorFamily::domain_distance(const ParamVec& theta) const {
  require_theta(theta);
  if (!theta.allFinite()) return -kInf;
  switch (kind_) {
    case FamilyKind::gevd: return std::min({theta(0), theta(1) + 0.5, std::abs(theta(1))});
    case FamilyKind::gpd: return std::min(theta(0), theta(1) + 0.5);
    case FamilyKind::poisson: return theta(0);
    case FamilyKind::binomial: return std::min(theta(0), 1.0 - theta(0));
    case FamilyKind::gauss_loc: return kInf;
  }
  return -kInf;
}

bool ErrorFamily::in_domain(const ParamVec& theta) const { return domain_distance(theta) > 0; }

void ErrorFamily::check_domain(const ParamVec& theta) const {
  double d = domain_distance(theta);
  if (d > 0) return;
  std::ostringstream os;
  os << name() << ": parameter (";
  for (Eigen::Index i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << fmt(theta(i));
  os << ") outside domain " << domain_text() << " (distance to boundary " << fmt(d) << ")";
  throw DomainError(os.str(), d);
}

ParamVec ErrorFamily::make_theta(std::initializer_list<double> values) const {
  ParamVec theta(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) theta(i++) = v;
  check_domain(theta);
  return theta;
}

double ErrorFamily::log_density(const ParamVec& theta, double y) const {
  check_domain(theta);
  if (std::isnan(y)) throw DomainError(name() + ": NaN observation");
  switch (kind_) {
    case FamilyKind::gevd: return gevd_log_density(theta(0), theta(1), y);
    case FamilyKind::gpd: return gpd_log_density(theta(0), theta(1), y);
    case FamilyKind::poisson: {
      if (!is_nonneg_integer(y)) return -kInf;
      double lam = theta(0);
      return y * std::log(lam) - lam - std::lgamma(y + 1.0);
    }
    case FamilyKind::binomial: {
      if (!is_nonneg_integer(y) || y > m_) return -kInf;
      double p = theta(0);
      double lc = std::lgamma(m_ + 1.0) - std::lgamma(y + 1.0) - std::lgamma(m_ - y + 1.0);
      double a = y > 0 ? y * std::log(p) : 0.0;
      double b = y < m_ ? (m_ - y) * std::log1p(-p) : 0.0;
      return lc + a + b;
    }
    case FamilyKind::gauss_loc: {
      double r = (y - theta(0)) / sd_;
      return -0.5 * r * r - std::log(sd_) - 0.5 * std::log(2.0 * M_PI);
    }
  }
  return -kInf;
}

bool ErrorFamily::in_support(const ParamVec& theta, double y) const {
  if (std::isnan(y)) return false;
  switch (kind_) {
    case FamilyKind::gevd: return 1.0 + theta(1) * y / theta(0) > 0;
    case FamilyKind::gpd: return y >= 0 && 1.0 + theta(1) * y / theta(0) > 0;
    case FamilyKind::poisson: return is_nonneg_integer(y);
    case FamilyKind::binomial: return is_nonneg_integer(y) && y <= m_;
    case FamilyKind::gauss_loc: return std::isfinite(y);
  }
  return false;
}

ParamVec ErrorFamily::score(const ParamVec& theta, double y) const {
  check_domain(theta);
  if (!in_support(theta, y)) {
    throw DomainError(name() + ": score undefined at y=" + fmt(y) + " (outside support interior)");
  }
  ParamVec out(1);
  switch (kind_) {
    case FamilyKind::gevd: return gevd_score(theta(0), theta(1), y);
    case FamilyKind::gpd: return gpd_score(theta(0), theta(1), y);
    case FamilyKind::poisson: out(0) = y / theta(0) - 1.0; return out;
    case FamilyKind::binomial: {
      double p = theta(0);
      out(0) = (y - m_ * p) / (p * (1.0 - p));
      return out;
    }
    case FamilyKind::gauss_loc: out(0) = (y - theta(0)) / (sd_ * sd_); return out;
  }
  return out;
}

ParamMat ErrorFamily::fisher_info(const ParamVec& theta) const {
  require_theta(theta);
  if (kind_ == FamilyKind::gevd || kind_ == FamilyKind::gpd) {
    // The excluded point ξ=0 of gevd is reported as a singularity, not a
    // domain violation.
    double s = theta(0), x = theta(1);
    if (!(s > 0) || !(x > -0.5) || !std::isfinite(s) || !std::isfinite(x)) check_domain(theta);
  } else {
    check_domain(theta);
  }
  return fisher_info_unchecked(theta);
}

ParamMat ErrorFamily::fisher_info_unchecked(const ParamVec& theta) const {
  ParamMat I(k(), k());
  switch (kind_) {
    case FamilyKind::gevd:
    case FamilyKind::gpd: {
      double s = theta(0), x = theta(1);
      if (x + 0.5 < kShapeGuard) {
        throw SingularityError(name() + ": Fisher information singular at xi=-1/2 (xi=" + fmt(x) +
                                   " inside guard band " + fmt(kShapeGuard) + ")",
                               -0.5);
      }
      if (kind_ == FamilyKind::gevd) {
        if (std::abs(x) < kShapeGuard) {
          throw SingularityError("gevd: Fisher information formula has a pole at xi=0 (xi=" + fmt(x) +
                                     " inside guard band " + fmt(kShapeGuard) + ")",
                                 0.0);
        }
        return gevd_fisher(s, x);
      }
      double c = 1.0 / (1.0 + 2.0 * x);
      I(0, 0) = c / (s * s);
      I(0, 1) = I(1, 0) = c / (s * (x + 1.0));
      I(1, 1) = c * 2.0 / (x + 1.0);
      return I;
    }
    case FamilyKind::poisson: I(0, 0) = 1.0 / theta(0); break;
    case FamilyKind::binomial: I(0, 0) = m_ / (theta(0) * (1.0 - theta(0))); break;
    case FamilyKind::gauss_loc: I(0, 0) = 1.0 / (sd_ * sd_); break;
  }
  return I;
}

double ErrorFamily::cdf(const ParamVec& theta, double y) const {
  check_domain(theta);
  if (std::isnan(y)) throw DomainError(name() + ": NaN observation");
  switch (kind_) {
    case FamilyKind::gevd: {
      double s = theta(0), x = theta(1);
      double z = 1.0 + x * y / s;
      if (!(z > 0)) return x > 0 ? 0.0 : 1.0;
      return std::exp(-std::exp(-std::log1p(x * y / s) / x));
    }
    case FamilyKind::gpd: {
      double s = theta(0), x = theta(1);
      if (y <= 0) return 0.0;
      if (x == 0) return -std::expm1(-y / s);
      if (!(1.0 + x * y / s > 0)) return 1.0;
      return -std::expm1(-std::log1p(x * y / s) / x);
    }
    case FamilyKind::poisson: return poisson_cdf(y, theta(0));
    case FamilyKind::binomial: return binomial_cdf(y, m_, theta(0));
    case FamilyKind::gauss_loc: return normal_cdf((y - theta(0)) / sd_);
  }
  return 0.0;
}

double ErrorFamily::survival(const ParamVec& theta, double y) const {
  check_domain(theta);
  if (std::isnan(y)) throw DomainError(name() + ": NaN observation");
  switch (kind_) {
    case FamilyKind::gevd: {
      double s = theta(0), x = theta(1);
      double z = 1.0 + x * y / s;
      if (!(z > 0)) return x > 0 ? 1.0 : 0.0;
      return -std::expm1(-std::exp(-std::log1p(x * y / s) / x));
    }
    case FamilyKind::gpd: {
      double s = theta(0), x = theta(1);
      if (y <= 0) return 1.0;
      if (x == 0) return std::exp(-y / s);
      if (!(1.0 + x * y / s > 0)) return 0.0;
      return std::exp(-std::log1p(x * y / s) / x);
    }
    case FamilyKind::poisson: return poisson_sf(y, theta(0));
    case FamilyKind::binomial: return binomial_sf(y, m_, theta(0));
    case FamilyKind::gauss_loc: return normal_cdf(-(y - theta(0)) / sd_);
  }
  return 0.0;
}

double ErrorFamily::quantile(const ParamVec& theta, double u) const {
  return quantile(theta, u, 1.0 - u);
}

double ErrorFamily::quantile(const ParamVec& theta, double u, double ubar) const {
  check_domain(theta);
  check_u(u, ubar);
  switch (kind_) {
    case FamilyKind::gevd: {
      double s = theta(0), x = theta(1);
      double t = u < 0.5 ? -std::log(u) : -std::log1p(-ubar);
      return s * std::expm1(-x * std::log(t)) / x;
    }
    case FamilyKind::gpd: {
      double s = theta(0), x = theta(1);
      double lb = ubar < 0.5 ? std::log(ubar) : std::log1p(-u);
      if (x == 0) return -s * lb;
      return s * std::expm1(-x * lb) / x;
    }
    case FamilyKind::gauss_loc:
      return theta(0) + sd_ * (u < 0.5 ? normal_quantile(u) : -normal_quantile(ubar));
    case FamilyKind::poisson:
    case FamilyKind::binomial: {
      // Smallest y with F(y) >= u; the upper tail is compared via the survival
      // function to keep precision for u near 1.
      auto reached = [&](double y) {
        return u <= 0.5 ? cdf(theta, y) >= u : survival(theta, y) <= ubar;
      };
      double mean, sd;
      if (kind_ == FamilyKind::poisson) {
        mean = theta(0);
        sd = std::sqrt(theta(0));
      } else {
        mean = m_ * theta(0);
        sd = std::sqrt(m_ * theta(0) * (1.0 - theta(0)));
      }
      double z = u < 0.5 ? normal_quantile(u) : -normal_quantile(ubar);
      double y = std::max(0.0, std::floor(mean + sd * z));
      if (kind_ == FamilyKind::binomial) y = std::min<double>(y, m_);
      while (!reached(y)) y += 1.0;
      while (y > 0 && reached(y - 1.0)) y -= 1.0;
      return y;
    }
  }
  return 0.0;
}

std::pair<double, double> ErrorFamily::support(const ParamVec& theta) const {
  check_domain(theta);
  switch (kind_) {
    case FamilyKind::gevd: {
      double e = -theta(0) / theta(1);
      return theta(1) > 0 ? std::make_pair(e, kInf) : std::make_pair(-kInf, e);
    }
    case FamilyKind::gpd:
      return theta(1) >= 0 ? std::make_pair(0.0, kInf) : std::make_pair(0.0, -theta(0) / theta(1));
    case FamilyKind::poisson: return {0.0, kInf};
    case FamilyKind::binomial: return {0.0, static_cast<double>(m_)};
    case FamilyKind::gauss_loc: return {-kInf, kInf};
  }
  return {-kInf, kInf};
}

std::vector<double> ErrorFamily::sample(const ParamVec& theta, std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw DomainError("sample size must be >= 1");
  check_domain(theta);
  Rng rng(seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) {
    double u = rng.uniform();
    v = quantile(theta, u, 1.0 - u);
  }
  return out;
}

namespace {

constexpr int kMcChunks = 16;

struct MomentSums {
  ParamVec s1;
  ParamVec s1sq;
  ParamMat s2;
  ParamMat s2sq;
};

ScoreMoments finish_moments(const std::vector<MomentSums>& parts, int k, std::size_t n) {
  MomentSums tot{ParamVec::Zero(k), ParamVec::Zero(k), ParamMat::Zero(k, k), ParamMat::Zero(k, k)};
  for (const auto& p : parts) {
    tot.s1 += p.s1;
    tot.s1sq += p.s1sq;
    tot.s2 += p.s2;
    tot.s2sq += p.s2sq;
  }
  double N = static_cast<double>(n);
  ScoreMoments m;
  m.draws = n;
  m.mean = tot.s1 / N;
  m.mean_se = ((tot.s1sq / N - m.mean.cwiseProduct(m.mean)).cwiseMax(0.0) / N).cwiseSqrt();
  ParamMat e2 = tot.s2 / N;
  m.cov = e2 - m.mean * m.mean.transpose();
  m.cov_se = ((tot.s2sq / N - e2.cwiseProduct(e2)).cwiseMax(0.0) / N).cwiseSqrt();
  return m;
}

template <class Draw>
ScoreMoments chunked_moments(const ErrorFamily& fam, const ParamVec& theta, std::size_t n,
                             std::uint64_t seed, Draw draw) {
  if (n < 2) throw DomainError("Monte Carlo needs at least 2 draws");
  fam.check_domain(theta);
  const int k = fam.k();
  std::vector<MomentSums> parts(kMcChunks);
  for_each_chunk(kMcChunks, [&](int c) {
    std::size_t lo = n * c / kMcChunks, hi = n * (c + 1) / kMcChunks;
    Rng rng(seed, static_cast<std::uint64_t>(c));
    MomentSums s{ParamVec::Zero(k), ParamVec::Zero(k), ParamMat::Zero(k, k), ParamMat::Zero(k, k)};
    for (std::size_t i = lo; i < hi; ++i) {
      double weight;
      double y = draw(rng, weight);
      ParamVec sc = fam.score(theta, y);
      ParamVec ws = weight * sc;
      ParamMat wss = ws * sc.transpose();
      s.s1 += ws;
      s.s1sq += ws.cwiseProduct(ws);
      s.s2 += wss;
      s.s2sq += wss.cwiseProduct(wss);
    }
    parts[c] = s;
  });
  return finish_moments(parts, k, n);
}

}  // namespace

ScoreMoments mc_score_moments(const ErrorFamily& fam, const ParamVec& theta, std::size_t n,
                              std::uint64_t seed) {
  return chunked_moments(fam, theta, n, seed, [&](Rng& rng, double& weight) {
    weight = 1.0;
    double u = rng.uniform();
    return fam.quantile(theta, u, 1.0 - u);
  });
}

ScoreMoments is_score_moments(const ErrorFamily& fam, const ParamVec& theta, std::size_t n,
                              std::uint64_t seed, double c) {
  if (fam.discrete()) throw DomainError("importance sampling is for continuous families");
  if (!(c >= 0 && c < 1)) throw DomainError("importance exponent must lie in [0, 1)");
  const double inv = 1.0 / (1.0 - c);
  return chunked_moments(fam, theta, n, seed, [&](Rng& rng, double& weight) {
    double pick = rng.uniform();
    double v = rng.uniform();
    double u, ubar;
    if (pick < 0.5) {
      u = v;
      ubar = 1.0 - v;
    } else {
      ubar = std::pow(v, inv);
      u = 1.0 - ubar;
    }
    weight = 1.0 / (0.5 + 0.5 * (1.0 - c) * std::pow(ubar, -c));
    return fam.quantile(theta, u, ubar);
  });
}

ParamMat fd_hessian(const ErrorFamily& fam, const ParamVec& theta, double y, double h) {
  fam.check_domain(theta);
  const int k = fam.k();
  double step = h;
  switch (fam.kind()) {
    case FamilyKind::gevd:
    case FamilyKind::gpd: {
      double s = theta(0), x = theta(1);
      double z = 1.0 + x * y / s;
      double dzs = std::abs((1.0 - z) / s);
      double dzx = x != 0 ? std::abs((z - 1.0) / x) : std::abs(y / s);
      double dz = std::max(dzs, dzx);
      if (dz > 0) step = std::min(step, 0.01 * z / dz);
      step = std::min(step, 0.5 * s);
      step = std::min(step, 0.5 * (x + 0.5));
      if (fam.kind() == FamilyKind::gevd) step = std::min(step, 0.5 * std::abs(x));
      break;
    }
    case FamilyKind::poisson: step = std::min(step, 0.5 * theta(0)); break;
    case FamilyKind::binomial: step = std::min(step, 0.5 * std::min(theta(0), 1.0 - theta(0))); break;
    case FamilyKind::gauss_loc: break;
  }
  ParamVec hv(k);
  for (int i = 0; i < k; ++i) hv(i) = (theta(i) + step) - theta(i);
  auto f = [&](int i, double si, int j, double sj) {
    ParamVec t = theta;
    if (i >= 0) t(i) += si * hv(i);
    if (j >= 0) t(j) += sj * hv(j);
    return fam.log_density(t, y);
  };
  double f0 = f(-1, 0, -1, 0);
  ParamMat H(k, k);
  for (int i = 0; i < k; ++i) {
    H(i, i) = (f(i, 1, -1, 0) - 2.0 * f0 + f(i, -1, -1, 0)) / (hv(i) * hv(i));
    for (int j = i + 1; j < k; ++j) {
      H(i, j) = H(j, i) = (f(i, 1, j, 1) - f(i, 1, j, -1) - f(i, -1, j, 1) + f(i, -1, j, -1)) /
                          (4.0 * hv(i) * hv(j));
    }
  }
  return H;
}

std::vector<double> discrete_support(const ErrorFamily& fam, const ParamVec& theta, double tail) {
  if (!fam.discrete()) throw DomainError(fam.name() + " is not a discrete family");
  fam.check_domain(theta);
  std::vector<double> ys;
  if (fam.kind() == FamilyKind::binomial) {
    for (int y = 0; y <= fam.trials(); ++y) ys.push_back(y);
    return ys;
  }
  for (double y = 0;; y += 1.0) {
    ys.push_back(y);
    if (y >= theta(0) && fam.survival(theta, y) <= tail) break;
  }
  return ys;
}

ParamMat bartlett_information(const ErrorFamily& fam, const ParamVec& theta, const QuantileGrid& grid,
                              double h) {
  const int k = fam.k();
  ParamMat acc = ParamMat::Zero(k, k);
  if (fam.discrete()) {
    for (double y : discrete_support(fam, theta)) {
      acc -= std::exp(fam.log_density(theta, y)) * fd_hessian(fam, theta, y, h);
    }
    return acc;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double y = fam.quantile(theta, grid.u[i], grid.ubar[i]);
    acc -= grid.weight[i] * fd_hessian(fam, theta, y, h);
  }
  return acc;
}

}  // namespace evglm
