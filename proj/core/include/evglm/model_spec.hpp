#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evglm/designs.hpp"
#include "evglm/glm.hpp"

namespace evglm {

/// Flat `key = value` model description.
///
///   family     gevd | gpd | poisson | binomial | gauss_loc   (required)
///   m          binomial trial count (binomial only, default 1)
///   sd         gauss_loc noise sd (gauss_loc only, default 1)
///   link       comma list, one link per parameter coordinate (required)
///   partition  comma list of block sizes (required)
///   beta       comma list of length p (required)
///   carrier    stochastic | deterministic (required)
///   regressors comma list of coordinate laws, e.g. const(1), normal(0, 1)
///   design     inverse_n | sign_grid(p) | leverage_outlier(s) | sampled(seed)
///   theta      natural parameter for the remainder check (optional)
///
/// `#` starts a comment. Unknown or repeated keys are parse errors.
struct ModelSpec {
  std::string family;
  int m = 1;
  double sd = 1.0;
  std::string link;
  std::vector<int> partition;
  std::vector<double> beta;
  std::string carrier;
  std::string regressors;
  std::string design;
  std::vector<double> theta;

  static ModelSpec parse(const std::string& text);
  static ModelSpec load(const std::string& path);
  /// Canonical text; parse(to_text()) reproduces the spec.
  std::string to_text() const;

  GlmSpec glm() const;
  Eigen::VectorXd beta_vector() const;
  bool stochastic() const { return carrier == "stochastic"; }
  RegressorSampler sampler() const;
  DesignSequence design_sequence() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Parses a comma-separated list of doubles; throws DomainError on junk.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace evglm
