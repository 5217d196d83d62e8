#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "evglm/quadrature.hpp"

namespace evglm {

constexpr int kMaxParamDim = 4;

/// Parameter vectors and k×k matrices; stack storage for k <= kMaxParamDim.
using ParamVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxParamDim, 1>;
using ParamMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxParamDim, kMaxParamDim>;

enum class FamilyKind { gevd, gpd, poisson, binomial, gauss_loc };

/// Width of the band around the GEVD poles ξ=0, ξ=−1/2 and the GPD pole
/// ξ=−1/2 inside which fisher_info refuses to evaluate.
constexpr double kShapeGuard = 1e-4;

/// Parametric error model Q_ϑ with μ fixed to 0 for gevd and gpd.
/// Natural parameters: gevd/gpd (σ, ξ); poisson λ; binomial p; gauss_loc the
/// location, with the noise standard deviation fixed at construction.
class ErrorFamily {
 public:
  static ErrorFamily gevd();
  static ErrorFamily gpd();
  static ErrorFamily poisson();
  static ErrorFamily binomial(int m);
  static ErrorFamily gauss_loc(double sd = 1.0);

  /// Accepts "gevd", "gpd", "poisson", "binomial" (needs m) and "gauss_loc".
  static ErrorFamily from_name(const std::string& name, int m = 1, double sd = 1.0);

  FamilyKind kind() const noexcept { return kind_; }
  int k() const noexcept { return (kind_ == FamilyKind::gevd || kind_ == FamilyKind::gpd) ? 2 : 1; }
  int trials() const noexcept { return m_; }
  double noise_sd() const noexcept { return sd_; }
  bool discrete() const noexcept {
    return kind_ == FamilyKind::poisson || kind_ == FamilyKind::binomial;
  }
  std::string name() const;
  std::vector<std::string> param_names() const;
  std::string domain_text() const;

  /// Signed distance of ϑ to the boundary of the open parameter domain;
  /// positive inside. For gevd the excluded point ξ=0 counts as boundary.
  double domain_distance(const ParamVec& theta) const;
  bool in_domain(const ParamVec& theta) const;
  void check_domain(const ParamVec& theta) const;

  /// Validated parameter vector.
  ParamVec make_theta(std::initializer_list<double> values) const;

  /// log of the density w.r.t. Lebesgue (continuous) or counting measure.
  /// −∞ outside the support.
  double log_density(const ParamVec& theta, double y) const;
  ParamVec score(const ParamVec& theta, double y) const;
  ParamMat fisher_info(const ParamVec& theta) const;
  /// fisher_info for a parameter already known to be in the domain; still
  /// enforces the singularity guard bands.
  ParamMat fisher_info_unchecked(const ParamVec& theta) const;

  double cdf(const ParamVec& theta, double y) const;
  double survival(const ParamVec& theta, double y) const;
  double quantile(const ParamVec& theta, double u) const;
  /// Quantile with the upper tail 1−u supplied separately.
  double quantile(const ParamVec& theta, double u, double ubar) const;
  /// Closed support interval (may contain ±∞).
  std::pair<double, double> support(const ParamVec& theta) const;
  bool in_support(const ParamVec& theta, double y) const;

  std::vector<double> sample(const ParamVec& theta, std::size_t n, std::uint64_t seed) const;

 private:
  ErrorFamily(FamilyKind kind, int m, double sd) : kind_(kind), m_(m), sd_(sd) {}
  void require_theta(const ParamVec& theta) const;

  FamilyKind kind_;
  int m_;
  double sd_;
};

/// Moments of the score under Q_ϑ estimated from draws.
struct ScoreMoments {
  ParamVec mean;
  ParamVec mean_se;
  ParamMat cov;     ///< estimate of E[ΛΛᵀ]
  ParamMat cov_se;  ///< entrywise Monte Carlo standard error of cov
  std::size_t draws = 0;
};

/// Plain i.i.d. Monte Carlo of score moments.
ScoreMoments mc_score_moments(const ErrorFamily& fam, const ParamVec& theta, std::size_t n,
                              std::uint64_t seed);

/// Defensive importance sampling on the quantile scale: half the draws are
/// uniform, half follow a density ∝ (1−u)^(−c) that oversamples the upper
/// tail. Keeps the estimator's variance finite for heavy-tailed score
/// products (GEVD with ξ < −1/4). Continuous families only.
ScoreMoments is_score_moments(const ErrorFamily& fam, const ParamVec& theta, std::size_t n,
                              std::uint64_t seed, double c = 0.75);

/// Central finite-difference Hessian of log_density in ϑ at y. The step is
/// `h`, shrunk for continuous families so that the stencil stays away from
/// a parameter-dependent support endpoint.
ParamMat fd_hessian(const ErrorFamily& fam, const ParamVec& theta, double y, double h = 1e-4);

/// −E[fd_hessian] by quadrature on the quantile grid (continuous families)
/// or by summation over the support (discrete families).
ParamMat bartlett_information(const ErrorFamily& fam, const ParamVec& theta,
                              const QuantileGrid& grid, double h = 1e-4);

/// Support points of a discrete family carrying all but `tail` of the mass.
std::vector<double> discrete_support(const ErrorFamily& fam, const ParamVec& theta, double tail = 1e-12);

}  // namespace evglm
