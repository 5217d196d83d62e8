#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "evglm/regressors.hpp"

namespace evglm {

/// Deterministic carrier: a triangular array of design rows x_{n,i},
/// generated for any n.
class DesignSequence {
 public:
  enum class Kind {
    inverse_n,         ///< p=1, x_{n,i} = 1/n
    sign_grid,         ///< coordinate j of row i is −1 if bit j of i is set, else +1
    leverage_outlier,  ///< p=1, rows 1 except the last, which equals `scale`
    sampled,           ///< first n draws of a regressor sampler with a fixed seed
    fixed,             ///< first n rows of a stored matrix
  };

  static DesignSequence inverse_n();
  static DesignSequence sign_grid(int p);
  static DesignSequence leverage_outlier(double scale);
  static DesignSequence sampled(RegressorSampler sampler, std::uint64_t seed);
  static DesignSequence fixed(Eigen::MatrixXd rows);

  /// Parses "inverse_n", "sign_grid(p)", "leverage_outlier(scale)",
  /// "sampled(seed)" (needs `sampler`).
  static DesignSequence parse(const std::string& text, const RegressorSampler* sampler = nullptr);

  Kind kind() const noexcept { return kind_; }
  int dim() const;
  /// Largest n available (fixed designs only; otherwise unbounded).
  Eigen::Index max_rows() const;
  std::string to_string() const;

  /// n×p matrix of design rows.
  Eigen::MatrixXd rows(int n) const;

 private:
  Kind kind_ = Kind::inverse_n;
  int p_ = 1;
  double scale_ = 1.0;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd fixed_;
  std::vector<CoordinateLaw> laws_;
};

}  // namespace evglm
