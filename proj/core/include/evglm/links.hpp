#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evglm/error_models.hpp"

namespace evglm {

enum class LinkKind {
  identity,
  log,
  logit,
  shape_gevd,          ///< log f(u)
  shape_gevd_shifted,  ///< log f(u) + 1/2, range (0, ∞)
  shape_gpd,           ///< log f_gpd(u), linear growth of f_gpd for u > 0
  binomial_rescaled,   ///< logistic(u)/2 − 1/2, range (−1/2, 0)
};

std::string link_name(LinkKind kind);
LinkKind link_kind_from_name(const std::string& name);
const std::vector<LinkKind>& all_link_kinds();

/// Constants of the slowly growing shape link
///   f(x) = x²/2 + x + 1                 for x > 0
///   f(x) = a1 / log(a2 − x)² + a3       for x <= 0
/// chosen so that f is C¹ at 0 and f > a3 = e^(−1/2).
struct ShapeLinkConstants {
  double a1 = 0;
  double a2 = 0;
  double a3 = 0;
  int iterations = 0;
};

/// Newton solve of a2·log(a2) = 2(1 − e^(−1/2)) from a2 = 1.5.
ShapeLinkConstants solve_shape_constants();
/// Solved once and cached.
const ShapeLinkConstants& shape_constants();

double shape_f(double x, const ShapeLinkConstants& c = shape_constants());
double shape_f_deriv(double x, const ShapeLinkConstants& c = shape_constants());
/// f_gpd(x) = x + 1 for x > 0, f(x) otherwise.
double shape_gpd_f(double x, const ShapeLinkConstants& c = shape_constants());
double shape_gpd_f_deriv(double x, const ShapeLinkConstants& c = shape_constants());

double link_value(LinkKind kind, double u);
double link_deriv(LinkKind kind, double u);

/// Componentwise link ℓ(θ) = (ℓ_1(θ_1), ..., ℓ_k(θ_k)); the Jacobian is
/// diagonal.
class LinkFunction {
 public:
  explicit LinkFunction(std::vector<LinkKind> kinds);
  /// Comma-separated link names, e.g. "log,shape_gevd_shifted".
  static LinkFunction parse(const std::string& text);

  int k() const noexcept { return static_cast<int>(kinds_.size()); }
  const std::vector<LinkKind>& kinds() const noexcept { return kinds_; }
  std::string to_string() const;

  ParamVec apply(const ParamVec& theta) const;
  ParamVec jacobian_diag(const ParamVec& theta) const;
  ParamMat jacobian(const ParamVec& theta) const;

 private:
  std::vector<LinkKind> kinds_;
};

struct LinkTableRow {
  double u;
  double link;
  double deriv;
};

std::vector<LinkTableRow> link_table(LinkKind kind, const std::vector<double>& grid);
/// CSV with header `u,link,deriv` and 17 significant digits.
void write_link_table_csv(std::ostream& os, const std::vector<LinkTableRow>& rows);

}  // namespace evglm
