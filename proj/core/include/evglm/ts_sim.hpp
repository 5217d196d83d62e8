#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "evglm/error_models.hpp"
#include "evglm/links.hpp"

namespace evglm {

/// X_t ~ Q(ℓ_σ(β_σᵀ log x̃_{(t−1):(t−p₁)}), ℓ_ξ(β_ξᵀ log x̃_{(t−1):(t−p₂)}))
/// with x̃ = max(x, x_min) and Q = GEVD or GPD (μ = 0).
struct TsConfig {
  FamilyKind family = FamilyKind::gevd;
  std::vector<double> beta_sigma{0.0};  ///< length p₁ (lag order)
  std::vector<double> beta_xi{0.0};     ///< length p₂
  LinkKind scale_link = LinkKind::log;
  LinkKind shape_link = LinkKind::shape_gevd_shifted;
  std::vector<double> start;  ///< x_{−1}, x_{−2}, ...; default all 1
  int T = 1000;
  double x_min = 1e-6;
  std::uint64_t seed = 1;
  int burn_in = -1;  ///< −1: 10·max(p₁, p₂)
  bool positive_shape_only = false;

  int lags() const;
  int effective_burn_in() const;
  void validate() const;
};

struct TsSeries {
  std::vector<double> sigma;
  std::vector<double> xi;
  std::vector<double> x;
  std::size_t clipped_steps = 0;  ///< steps where some lagged value was clipped at x_min
  int burn_in = 0;

  double clip_rate() const { return x.empty() ? 0.0 : static_cast<double>(clipped_steps) / x.size(); }
};

/// Throws DomainError naming t and θ when the link output leaves the family
/// domain (or ξ_t <= 0 under positive_shape_only).
TsSeries simulate(const TsConfig& cfg);

/// CSV `t,sigma,xi,x` (t from 1), 17 significant digits.
void write_series_csv(std::ostream& os, const TsSeries& s);

/// Type-7 empirical quantile.
double empirical_quantile(std::vector<double> values, double u);

struct ClusterSummary {
  double u = 0;
  double threshold = 0;
  std::size_t exceedances = 0;
  std::size_t clusters = 0;
  double mean_cluster_size = 0;
};

/// Runs declustering with gap 1: clusters are maximal runs of consecutive
/// exceedances of the empirical u-quantile.
ClusterSummary cluster_summary(const std::vector<double>& x, double u);

/// Mean of ξ_t over steps whose previous value exceeds the empirical
/// u-quantile of the series (post burn-in).
double conditional_shape_mean(const TsSeries& s, double u = 0.9);

/// The series after burn-in.
std::vector<double> post_burn_in(const TsSeries& s);

}  // namespace evglm
