#include "evglm/quadrature.hpp"

#include <cmath>

#include "evglm/errors.hpp"

namespace evglm {

QuantileGrid QuantileGrid::midpoint(int G) {
  if (G < 1) throw DomainError("quadrature grid size must be >= 1");
  QuantileGrid g;
  g.u.resize(G);
  g.ubar.resize(G);
  g.weight.assign(G, 1.0 / G);
  for (int i = 0; i < G; ++i) {
    g.u[i] = (i + 0.5) / G;
    g.ubar[i] = (G - i - 0.5) / G;
  }
  return g;
}

QuantileGrid QuantileGrid::graded(int G, int q) {
  if (G < 1) throw DomainError("quadrature grid size must be >= 1");
  if (q < 1) throw DomainError("grading exponent must be >= 1");
  QuantileGrid g;
  g.u.resize(G);
  g.ubar.resize(G);
  g.weight.resize(G);
  for (int i = 0; i < G; ++i) {
    double v = (i + 0.5) / G;
    double vb = (G - i - 0.5) / G;
    double a = std::pow(v, q);
    double b = std::pow(vb, q);
    double den = a + b;
    g.u[i] = a / den;
    g.ubar[i] = b / den;
    g.weight[i] = q * std::pow(v, q - 1) * std::pow(vb, q - 1) / (den * den) / G;
  }
  return g;
}

}  // namespace evglm
