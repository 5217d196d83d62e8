#include "evglm/ts_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "evglm/errors.hpp"
#include "evglm/rng.hpp"

namespace evglm {

int TsConfig::lags() const {
  return static_cast<int>(std::max(beta_sigma.size(), beta_xi.size()));
}

int TsConfig::effective_burn_in() const { return burn_in >= 0 ? burn_in : 10 * lags(); }

void TsConfig::validate() const {
  if (family != FamilyKind::gevd && family != FamilyKind::gpd) {
    throw DomainError("time series family must be gevd or gpd");
  }
  if (T < 1) throw DomainError("series length T must be >= 1");
  if (!(x_min > 0)) throw DomainError("clipping floor x_min must be positive");
  if (!start.empty() && static_cast<int>(start.size()) != lags()) {
    throw DimensionError("need " + std::to_string(lags()) + " starting values, got " + std::to_string(start.size()));
  }
  for (double s : start) {
    if (!(s >= x_min)) throw DomainError("starting values must be >= x_min");
  }
  for (double b : beta_sigma) {
    if (!std::isfinite(b)) throw DomainError("beta_sigma must be finite");
  }
  for (double b : beta_xi) {
    if (!std::isfinite(b)) throw DomainError("beta_xi must be finite");
  }
}

TsSeries simulate(const TsConfig& cfg) {
  cfg.validate();
  ErrorFamily fam = cfg.family == FamilyKind::gevd ? ErrorFamily::gevd() : ErrorFamily::gpd();
  const int L = cfg.lags();
  // hist[j] is x_{t−1−j}
  std::vector<double> hist = cfg.start.empty() ? std::vector<double>(static_cast<std::size_t>(L), 1.0) : cfg.start;
  TsSeries out;
  out.burn_in = cfg.effective_burn_in();
  out.sigma.reserve(cfg.T);
  out.xi.reserve(cfg.T);
  out.x.reserve(cfg.T);
  Rng rng(cfg.seed, 0);
  ParamVec theta(2), vt(2);
  for (int t = 0; t < cfg.T; ++t) {
    bool clipped = false;
    auto predictor = [&](const std::vector<double>& b) {
      double acc = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        double v = hist[j];
        if (v < cfg.x_min) {
          v = cfg.x_min;
          clipped = true;
        }
        acc += b[j] * std::log(v);
      }
      return acc;
    };
    theta(0) = predictor(cfg.beta_sigma);
    theta(1) = predictor(cfg.beta_xi);
    vt(0) = link_value(cfg.scale_link, theta(0));
    vt(1) = link_value(cfg.shape_link, theta(1));
    if (!fam.in_domain(vt) || (cfg.positive_shape_only && !(vt(1) > 0))) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "step t=%d: theta=(%.17g, %.17g) maps to (sigma, xi)=(%.17g, %.17g) outside the %s domain%s",
                    t + 1, theta(0), theta(1), vt(0), vt(1), fam.name().c_str(),
                    cfg.positive_shape_only ? " restricted to xi > 0" : "");
      throw DomainError(buf, fam.domain_distance(vt));
    }
    double u = rng.uniform();
    double x = fam.quantile(vt, u, 1.0 - u);
    if (clipped) ++out.clipped_steps;
    out.sigma.push_back(vt(0));
    out.xi.push_back(vt(1));
    out.x.push_back(x);
    if (L > 0) {
      std::rotate(hist.rbegin(), hist.rbegin() + 1, hist.rend());
      hist[0] = x;
    }
  }
  return out;
}

void write_series_csv(std::ostream& os, const TsSeries& s) {
  os << "t,sigma,xi,x\n";
  char buf[128];
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1, s.sigma[i], s.xi[i], s.x[i]);
    os << buf;
  }
}

double empirical_quantile(std::vector<double> values, double u) {
  if (values.empty()) throw DomainError("quantile of an empty series");
  if (!(u >= 0 && u <= 1)) throw DomainError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  double h = (values.size() - 1) * u;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

ClusterSummary cluster_summary(const std::vector<double>& x, double u) {
  ClusterSummary s;
  s.u = u;
  s.threshold = empirical_quantile(x, u);
  bool in_run = false;
  for (double v : x) {
    bool exc = v > s.threshold;
    if (exc) {
      ++s.exceedances;
      if (!in_run) ++s.clusters;
    }
    in_run = exc;
  }
  s.mean_cluster_size = s.clusters ? static_cast<double>(s.exceedances) / s.clusters : 0.0;
  return s;
}

std::vector<double> post_burn_in(const TsSeries& s) {
  auto b = std::min<std::size_t>(static_cast<std::size_t>(std::max(s.burn_in, 0)), s.x.size());
  return std::vector<double>(s.x.begin() + static_cast<std::ptrdiff_t>(b), s.x.end());
}

double conditional_shape_mean(const TsSeries& s, double u) {
  auto b = std::min<std::size_t>(static_cast<std::size_t>(std::max(s.burn_in, 0)), s.x.size());
  if (s.x.size() < b + 2) throw DomainError("series too short after burn-in");
  double thr = empirical_quantile(post_burn_in(s), u);
  double acc = 0;
  std::size_t n = 0;
  for (std::size_t t = b + 1; t < s.x.size(); ++t) {
    if (s.x[t - 1] > thr) {
      acc += s.xi[t];
      ++n;
    }
  }
  return n ? acc / n : std::nan("");
}

}  // namespace evglm
