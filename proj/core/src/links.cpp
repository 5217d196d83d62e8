#include "evglm/links.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "evglm/errors.hpp"

namespace evglm {

std::string link_name(LinkKind kind) {
  switch (kind) {
    case LinkKind::identity: return "identity";
    case LinkKind::log: return "log";
    case LinkKind::logit: return "logit";
    case LinkKind::shape_gevd: return "shape_gevd";
    case LinkKind::shape_gevd_shifted: return "shape_gevd_shifted";
    case LinkKind::shape_gpd: return "shape_gpd";
    case LinkKind::binomial_rescaled: return "binomial_rescaled";
  }
  return "?";
}

const std::vector<LinkKind>& all_link_kinds() {
  static const std::vector<LinkKind> kinds = {
      LinkKind::identity,   LinkKind::log,       LinkKind::logit,
      LinkKind::shape_gevd, LinkKind::shape_gevd_shifted, LinkKind::shape_gpd,
      LinkKind::binomial_rescaled};
  return kinds;
}

LinkKind link_kind_from_name(const std::string& name) {
  for (LinkKind k : all_link_kinds()) {
    if (link_name(k) == name) return k;
  }
  throw DomainError("unknown link '" + name + "'");
}

ShapeLinkConstants solve_shape_constants() {
  const double target = 2.0 * (1.0 - std::exp(-0.5));
  double a = 1.5;
  int it = 0;
  for (; it < 100; ++it) {
    double g = a * std::log(a) - target;
    double step = g / (std::log(a) + 1.0);
    a -= step;
    if (std::abs(step) < 1e-12) break;
  }
  if (it == 100) throw ConvergenceError("shape link constant solve did not converge");
  ShapeLinkConstants c;
  double la = std::log(a);
  c.a2 = a;
  c.a1 = 0.5 * a * la * la * la;
  c.a3 = std::exp(-0.5);
  c.iterations = it + 1;
  return c;
}

const ShapeLinkConstants& shape_constants() {
  static const ShapeLinkConstants c = solve_shape_constants();
  return c;
}

double shape_f(double x, const ShapeLinkConstants& c) {
  if (x > 0) return 0.5 * x * x + x + 1.0;
  double l = std::log(c.a2 - x);
  return c.a1 / (l * l) + c.a3;
}

double shape_f_deriv(double x, const ShapeLinkConstants& c) {
  if (x > 0) return x + 1.0;
  double l = std::log(c.a2 - x);
  return 2.0 * c.a1 / ((c.a2 - x) * l * l * l);
}

double shape_gpd_f(double x, const ShapeLinkConstants& c) { return x > 0 ? x + 1.0 : shape_f(x, c); }

double shape_gpd_f_deriv(double x, const ShapeLinkConstants& c) {
  return x > 0 ? 1.0 : shape_f_deriv(x, c);
}

namespace {

double logistic(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

double link_value(LinkKind kind, double u) {
  switch (kind) {
    case LinkKind::identity: return u;
    case LinkKind::log: return std::exp(u);
    case LinkKind::logit: return logistic(u);
    case LinkKind::shape_gevd: return std::log(shape_f(u));
    case LinkKind::shape_gevd_shifted: return std::log(shape_f(u)) + 0.5;
    case LinkKind::shape_gpd: return std::log(shape_gpd_f(u));
    case LinkKind::binomial_rescaled: return 0.5 * logistic(u) - 0.5;
  }
  return u;
}

double link_deriv(LinkKind kind, double u) {
  switch (kind) {
    case LinkKind::identity: return 1.0;
    case LinkKind::log: return std::exp(u);
    case LinkKind::logit: {
      double p = logistic(u);
      return p * (1.0 - p);
    }
    case LinkKind::shape_gevd:
    case LinkKind::shape_gevd_shifted: return shape_f_deriv(u) / shape_f(u);
    case LinkKind::shape_gpd: return shape_gpd_f_deriv(u) / shape_gpd_f(u);
    case LinkKind::binomial_rescaled: {
      double p = logistic(u);
      return 0.5 * p * (1.0 - p);
    }
  }
  return 1.0;
}

LinkFunction::LinkFunction(std::vector<LinkKind> kinds) : kinds_(std::move(kinds)) {
  if (kinds_.empty()) throw DimensionError("link needs at least one coordinate");
  if (kinds_.size() > static_cast<std::size_t>(kMaxParamDim)) {
    throw DimensionError("link dimension exceeds " + std::to_string(kMaxParamDim));
  }
}

LinkFunction LinkFunction::parse(const std::string& text) {
  std::vector<LinkKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw DomainError("empty link name in '" + text + "'");
    kinds.push_back(link_kind_from_name(item.substr(b, e - b + 1)));
  }
  return LinkFunction(std::move(kinds));
}

std::string LinkFunction::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (i) out += ",";
    out += link_name(kinds_[i]);
  }
  return out;
}

ParamVec LinkFunction::apply(const ParamVec& theta) const {
  if (theta.size() != k()) throw DimensionError("link input has wrong length");
  ParamVec out(k());
  for (int i = 0; i < k(); ++i) {
    if (!std::isfinite(theta(i))) throw DomainError("link input must be finite");
    out(i) = link_value(kinds_[i], theta(i));
  }
  return out;
}

ParamVec LinkFunction::jacobian_diag(const ParamVec& theta) const {
  if (theta.size() != k()) throw DimensionError("link input has wrong length");
  ParamVec out(k());
  for (int i = 0; i < k(); ++i) out(i) = link_deriv(kinds_[i], theta(i));
  return out;
}

ParamMat LinkFunction::jacobian(const ParamVec& theta) const {
  return jacobian_diag(theta).asDiagonal();
}

std::vector<LinkTableRow> link_table(LinkKind kind, const std::vector<double>& grid) {
  std::vector<LinkTableRow> rows;
  rows.reserve(grid.size());
  for (double u : grid) {
    if (!std::isfinite(u)) throw DomainError("link table grid must be finite");
    rows.push_back({u, link_value(kind, u), link_deriv(kind, u)});
  }
  return rows;
}

void write_link_table_csv(std::ostream& os, const std::vector<LinkTableRow>& rows) {
  os << "u,link,deriv\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.u, r.link, r.deriv);
    os << buf;
  }
}

}  // namespace evglm
