#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evglm/rng.hpp"

namespace evglm {

/// Distribution of one regressor coordinate.
struct CoordinateLaw {
  enum class Kind { constant, normal, lognormal, cauchy, uniform, log_gevd };
  Kind kind = Kind::constant;
  /// constant: {value}; normal/lognormal: {mean, sd} (of the log for
  /// lognormal); cauchy: {location, scale}; uniform: {lo, hi};
  /// log_gevd: {sigma, xi, floor}, the law of log(max(X, floor)) with
  /// X ~ GEVD(0, sigma, xi).
  std::vector<double> args;

  /// Maps one open-interval uniform to a draw.
  double draw(double u) const;
  std::string to_string() const;
  /// Parses `name(arg, ...)`, e.g. "normal(0, 1)" or "const(1)".
  static CoordinateLaw parse(const std::string& text);
};

/// Regressor distribution K on ℝᵖ: independent coordinates, or resampling
/// from a fixed point list.
class RegressorSampler {
 public:
  explicit RegressorSampler(std::vector<CoordinateLaw> laws);
  static RegressorSampler from_points(Eigen::MatrixXd points);  // n×p
  /// Comma-separated coordinate laws.
  static RegressorSampler parse(const std::string& text);

  int dim() const;
  bool empirical() const noexcept { return laws_.empty(); }
  const std::vector<CoordinateLaw>& laws() const noexcept { return laws_; }
  std::string to_string() const;

  /// One draw into x (length dim()); consumes a fixed number of uniforms.
  void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> x) const;

  /// n draws as columns of a p×n matrix, from chunked substreams of seed.
  /// Column order does not depend on the worker count.
  Eigen::MatrixXd draw_columns(std::size_t n, std::uint64_t seed) const;

 private:
  std::vector<CoordinateLaw> laws_;
  Eigen::MatrixXd points_;
};

/// Splits on commas that are not inside parentheses.
std::vector<std::string> split_top_level(const std::string& text);

}  // namespace evglm
