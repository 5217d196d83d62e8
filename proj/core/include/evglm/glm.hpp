#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "evglm/error_models.hpp"
#include "evglm/links.hpp"
#include "evglm/partition.hpp"
#include "evglm/regressors.hpp"

namespace evglm {

/// Error family + componentwise link + partition. The carrier (regressor
/// law or design) is supplied to the operations that need it.
class GlmSpec {
 public:
  GlmSpec(ErrorFamily family, LinkFunction link, PartitionSpec partition);

  const ErrorFamily& family() const noexcept { return family_; }
  const LinkFunction& link() const noexcept { return link_; }
  const PartitionSpec& partition() const noexcept { return partition_; }
  int k() const noexcept { return family_.k(); }
  int p() const noexcept { return partition_.dim(); }

 private:
  ErrorFamily family_;
  LinkFunction link_;
  PartitionSpec partition_;
};

/// θ = T_π(x, β).
ParamVec linear_predictor(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const Eigen::Ref<const Eigen::VectorXd>& x);

/// ϑ = ℓ(θ), validated against the family domain. The error message names
/// θ and the link when the link output leaves the domain.
ParamVec parameter_from_predictor(const GlmSpec& spec, const ParamVec& theta);

/// ℓ̇ᵀ I^Q_ϑ ℓ̇ at θ, the k×k matrix that M_π spreads over x.
ParamMat fisher_core(const GlmSpec& spec, const ParamVec& theta);

double glm_log_density(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                       const Eigen::Ref<const Eigen::VectorXd>& x, double y);

/// Λ^P_β(x, y) = ρ_π(ℓ̇(θ)ᵀ Λ^Q_ϑ(y), x).
Eigen::VectorXd glm_score(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const Eigen::Ref<const Eigen::VectorXd>& x, double y);

/// I^P(x) = M_π(ℓ̇ᵀ I^Q ℓ̇, x, x).
Eigen::MatrixXd per_x_fisher(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                             const Eigen::Ref<const Eigen::VectorXd>& x);

struct FisherEstimate {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd se;  ///< entrywise Monte Carlo standard error (zero for designs)
  std::size_t draws = 0;
};

/// ∫ I^P(x) K(dx) by Monte Carlo. A draw whose parameter leaves the family
/// domain aborts with a DomainError naming the draw.
FisherEstimate total_fisher_mc(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                               const RegressorSampler& sampler, std::size_t draws, std::uint64_t seed);

/// Σ_i I^P(x_i) over design rows (n×p).
Eigen::MatrixXd total_fisher_design(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                                    const Eigen::Ref<const Eigen::MatrixXd>& design);

/// Formats a vector as "(a, b, ...)" with 17 significant digits.
std::string format_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace evglm
