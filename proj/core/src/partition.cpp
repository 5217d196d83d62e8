#include "evglm/partition.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "evglm/errors.hpp"

namespace evglm {

PartitionSpec::PartitionSpec(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw DimensionError("partition needs at least one block");
  offsets_.reserve(dims_.size() + 1);
  offsets_.push_back(0);
  for (int d : dims_) {
    if (d < 1) throw DimensionError("partition block sizes must be >= 1, got " + std::to_string(d));
    offsets_.push_back(offsets_.back() + d);
  }
}

PartitionSpec PartitionSpec::single(int p) { return PartitionSpec({p}); }

namespace {

void require_len(Eigen::Index got, int want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace

VectorXd t_pi(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
              const PartitionSpec& pi) {
  require_len(a.size(), pi.dim(), "t_pi(a)");
  require_len(b.size(), pi.dim(), "t_pi(b)");
  VectorXd out(pi.blocks());
  for (int h = 0; h < pi.blocks(); ++h) {
    out(h) = a.segment(pi.offset(h), pi.block_size(h)).dot(b.segment(pi.offset(h), pi.block_size(h)));
  }
  return out;
}

VectorXd rho_pi(const Eigen::Ref<const VectorXd>& c, const Eigen::Ref<const VectorXd>& a,
                const PartitionSpec& pi) {
  require_len(c.size(), pi.blocks(), "rho_pi(c)");
  require_len(a.size(), pi.dim(), "rho_pi(a)");
  VectorXd out(pi.dim());
  for (int h = 0; h < pi.blocks(); ++h) {
    out.segment(pi.offset(h), pi.block_size(h)) = c(h) * a.segment(pi.offset(h), pi.block_size(h));
  }
  return out;
}

MatrixXd rho_pi_columns(const Eigen::Ref<const MatrixXd>& C, const Eigen::Ref<const VectorXd>& a,
                const PartitionSpec& pi) {
  require_len(C.rows(), pi.blocks(), "rho_pi(C) rows");
  require_len(a.size(), pi.dim(), "rho_pi(a)");
  MatrixXd out(pi.dim(), C.cols());
  for (Eigen::Index l = 0; l < C.cols(); ++l) {
    for (int h = 0; h < pi.blocks(); ++h) {
      out.col(l).segment(pi.offset(h), pi.block_size(h)) =
          C(h, l) * a.segment(pi.offset(h), pi.block_size(h));
    }
  }
  return out;
}

MatrixXd m_pi(const Eigen::Ref<const MatrixXd>& C, const Eigen::Ref<const VectorXd>& a,
              const Eigen::Ref<const VectorXd>& b, const PartitionSpec& pi) {
  require_len(C.rows(), pi.blocks(), "m_pi(C) rows");
  require_len(C.cols(), pi.blocks(), "m_pi(C) cols");
  require_len(a.size(), pi.dim(), "m_pi(a)");
  require_len(b.size(), pi.dim(), "m_pi(b)");
  MatrixXd out(pi.dim(), pi.dim());
  for (int h1 = 0; h1 < pi.blocks(); ++h1) {
    for (int h2 = 0; h2 < pi.blocks(); ++h2) {
      out.block(pi.offset(h1), pi.offset(h2), pi.block_size(h1), pi.block_size(h2)) =
          C(h1, h2) * a.segment(pi.offset(h1), pi.block_size(h1)) *
          b.segment(pi.offset(h2), pi.block_size(h2)).transpose();
    }
  }
  return out;
}

VectorXd block_sq_norms(const Eigen::Ref<const VectorXd>& a, const PartitionSpec& pi) {
  require_len(a.size(), pi.dim(), "block_sq_norms(a)");
  VectorXd out(pi.blocks());
  for (int h = 0; h < pi.blocks(); ++h) {
    out(h) = a.segment(pi.offset(h), pi.block_size(h)).squaredNorm();
  }
  return out;
}

double m_pi_frobenius(const Eigen::Ref<const MatrixXd>& C, const Eigen::Ref<const VectorXd>& sq_norms) {
  // |M|_F² = Σ_{h1,h2} C²_{h1h2} |a_{h1}|² |a_{h2}|²
  double acc = 0.0;
  for (Eigen::Index h1 = 0; h1 < C.rows(); ++h1) {
    for (Eigen::Index h2 = 0; h2 < C.cols(); ++h2) {
      acc += C(h1, h2) * C(h1, h2) * sq_norms(h1) * sq_norms(h2);
    }
  }
  return std::sqrt(acc);
}

}  // namespace evglm
