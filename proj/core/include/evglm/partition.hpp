#pragma once

#include <vector>

#include <Eigen/Dense>

namespace evglm {

/// Block structure π = (p_1, ..., p_k) of a p-vector of regressors: block h
/// holds the p_h coordinates that drive parameter coordinate h. Storage is
/// always the flat p-vector; (h, j) is the view offset(h) + j.
class PartitionSpec {
 public:
  explicit PartitionSpec(std::vector<int> block_dims);

  /// One block holding all p coordinates.
  static PartitionSpec single(int p);

  int blocks() const noexcept { return static_cast<int>(dims_.size()); }
  int dim() const noexcept { return offsets_.back(); }
  int block_size(int h) const { return dims_.at(h); }
  int offset(int h) const { return offsets_.at(h); }
  const std::vector<int>& block_dims() const noexcept { return dims_; }

  friend bool operator==(const PartitionSpec& a, const PartitionSpec& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
};

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// T_π(a, b): blockwise inner products, a k-vector.
VectorXd t_pi(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
              const PartitionSpec& pi);

/// ρ_π(c, a): scales block h of a by c_h.
VectorXd rho_pi(const Eigen::Ref<const VectorXd>& c, const Eigen::Ref<const VectorXd>& a,
                const PartitionSpec& pi);

/// Column-wise ρ_π for a k×m matrix C; the result is p×m.
MatrixXd rho_pi_columns(const Eigen::Ref<const MatrixXd>& C, const Eigen::Ref<const VectorXd>& a,
                const PartitionSpec& pi);

/// M_π(C, a, b): block (h1, h2) is C(h1, h2) · a_{h1} b_{h2}ᵀ.
MatrixXd m_pi(const Eigen::Ref<const MatrixXd>& C, const Eigen::Ref<const VectorXd>& a,
              const Eigen::Ref<const VectorXd>& b, const PartitionSpec& pi);

/// Squared block norms |a_h|², a k-vector. Used for Frobenius norms of
/// M_π(C, a, a) without forming the p×p matrix.
VectorXd block_sq_norms(const Eigen::Ref<const VectorXd>& a, const PartitionSpec& pi);

/// |M_π(C, a, a)|_F computed from C and the block norms of a.
double m_pi_frobenius(const Eigen::Ref<const MatrixXd>& C, const Eigen::Ref<const VectorXd>& sq_norms);

}  // namespace evglm
