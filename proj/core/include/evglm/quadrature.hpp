#pragma once

#include <vector>

namespace evglm {

/// Nodes on the probability scale for integrals ∫ g(F⁻¹(u)) du.
/// Both u and 1−u are stored so that upper-tail quantiles keep precision.
struct QuantileGrid {
  std::vector<double> u;
  std::vector<double> ubar;
  std::vector<double> weight;

  std::size_t size() const { return u.size(); }

  /// Midpoint rule u_i = (2i−1)/(2G).
  static QuantileGrid midpoint(int G);

  /// Midpoint rule in v mapped by u = v^q / (v^q + (1−v)^q). Clusters nodes
  /// at both endpoints where score products have integrable singularities.
  static QuantileGrid graded(int G, int q = 5);
};

}  // namespace evglm
