#include "evglm/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evglm/errors.hpp"
#include "evglm/parallel.hpp"
#include "evglm/special.hpp"

namespace evglm {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct LawInfo {
  CoordinateLaw::Kind kind;
  const char* name;
  std::size_t min_args;
  std::size_t max_args;
};

const LawInfo kLaws[] = {
    {CoordinateLaw::Kind::constant, "const", 1, 1},
    {CoordinateLaw::Kind::normal, "normal", 0, 2},
    {CoordinateLaw::Kind::lognormal, "lognormal", 0, 2},
    {CoordinateLaw::Kind::cauchy, "cauchy", 0, 2},
    {CoordinateLaw::Kind::uniform, "uniform", 2, 2},
    {CoordinateLaw::Kind::log_gevd, "log_gevd", 2, 3},
};

const LawInfo& info(CoordinateLaw::Kind k) {
  for (const auto& l : kLaws) {
    if (l.kind == k) return l;
  }
  return kLaws[0];
}

constexpr std::size_t kDrawChunks = 64;

}  // namespace

std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

double CoordinateLaw::draw(double u) const {
  switch (kind) {
    case Kind::constant: return args[0];
    case Kind::normal: return args[0] + args[1] * normal_quantile(u);
    case Kind::lognormal: return std::exp(args[0] + args[1] * normal_quantile(u));
    case Kind::cauchy: return args[0] + args[1] * std::tan(M_PI * (u - 0.5));
    case Kind::uniform: return args[0] + (args[1] - args[0]) * u;
    case Kind::log_gevd: {
      double s = args[0], xi = args[1];
      double t = u < 0.5 ? -std::log(u) : -std::log1p(-(1.0 - u));
      double x = s * std::expm1(-xi * std::log(t)) / xi;
      return std::log(std::max(x, args[2]));
    }
  }
  return 0.0;
}

std::string CoordinateLaw::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << info(kind).name << "(";
  for (std::size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << args[i];
  os << ")";
  return os.str();
}

CoordinateLaw CoordinateLaw::parse(const std::string& raw) {
  std::string text = trim(raw);
  auto open = text.find('(');
  std::string name = trim(open == std::string::npos ? text : text.substr(0, open));
  std::vector<double> args;
  if (open != std::string::npos) {
    if (text.back() != ')') throw DomainError("regressor law '" + text + "' is missing ')'");
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    if (!trim(inner).empty()) {
      for (const auto& a : split_top_level(inner)) {
        std::size_t pos = 0;
        double v;
        try {
          v = std::stod(a, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos == 0 || pos != a.size()) throw DomainError("bad number '" + a + "' in '" + text + "'");
        args.push_back(v);
      }
    }
  }
  for (const auto& l : kLaws) {
    if (name != l.name) continue;
    if (args.size() < l.min_args || args.size() > l.max_args) {
      throw DomainError("regressor law '" + name + "' takes " + std::to_string(l.min_args) + ".." +
                        std::to_string(l.max_args) + " arguments");
    }
    CoordinateLaw law;
    law.kind = l.kind;
    law.args = args;
    switch (l.kind) {
      case Kind::normal:
      case Kind::lognormal:
        if (law.args.size() < 1) law.args.push_back(0.0);
        if (law.args.size() < 2) law.args.push_back(1.0);
        if (!(law.args[1] > 0)) throw DomainError(name + ": sd must be positive");
        break;
      case Kind::cauchy:
        if (law.args.size() < 1) law.args.push_back(0.0);
        if (law.args.size() < 2) law.args.push_back(1.0);
        if (!(law.args[1] > 0)) throw DomainError("cauchy: scale must be positive");
        break;
      case Kind::uniform:
        if (!(law.args[1] > law.args[0])) throw DomainError("uniform: need lo < hi");
        break;
      case Kind::log_gevd:
        if (law.args.size() < 3) law.args.push_back(1e-6);
        if (!(law.args[0] > 0) || law.args[1] == 0 || !(law.args[1] > -0.5) || !(law.args[2] > 0)) {
          throw DomainError("log_gevd: need sigma > 0, xi in (-1/2,0) or (0,inf), floor > 0");
        }
        break;
      case Kind::constant: break;
    }
    return law;
  }
  throw DomainError("unknown regressor law '" + name + "'");
}

RegressorSampler::RegressorSampler(std::vector<CoordinateLaw> laws) : laws_(std::move(laws)) {
  if (laws_.empty()) throw DimensionError("regressor sampler needs at least one coordinate");
}

RegressorSampler RegressorSampler::from_points(Eigen::MatrixXd points) {
  if (points.rows() < 1 || points.cols() < 1) throw DimensionError("empty regressor point list");
  RegressorSampler s({CoordinateLaw{}});
  s.laws_.clear();
  s.points_ = std::move(points);
  return s;
}

RegressorSampler RegressorSampler::parse(const std::string& text) {
  std::vector<CoordinateLaw> laws;
  for (const auto& part : split_top_level(text)) laws.push_back(CoordinateLaw::parse(part));
  return RegressorSampler(std::move(laws));
}

int RegressorSampler::dim() const {
  return empirical() ? static_cast<int>(points_.cols()) : static_cast<int>(laws_.size());
}

std::string RegressorSampler::to_string() const {
  if (empirical()) return "points(" + std::to_string(points_.rows()) + ")";
  std::string out;
  for (std::size_t i = 0; i < laws_.size(); ++i) out += (i ? ", " : "") + laws_[i].to_string();
  return out;
}

void RegressorSampler::draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> x) const {
  if (empirical()) {
    auto n = static_cast<double>(points_.rows());
    auto i = static_cast<Eigen::Index>(std::min(n - 1.0, std::floor(rng.uniform() * n)));
    x = points_.row(i).transpose();
    return;
  }
  for (std::size_t j = 0; j < laws_.size(); ++j) x(static_cast<Eigen::Index>(j)) = laws_[j].draw(rng.uniform());
}

Eigen::MatrixXd RegressorSampler::draw_columns(std::size_t n, std::uint64_t seed) const {
  Eigen::MatrixXd out(dim(), static_cast<Eigen::Index>(n));
  for_each_chunk(static_cast<int>(kDrawChunks), [&](int c) {
    std::size_t lo = n * c / kDrawChunks, hi = n * (c + 1) / kDrawChunks;
    Rng rng(seed, 1000 + static_cast<std::uint64_t>(c));
    for (std::size_t i = lo; i < hi; ++i) draw(rng, out.col(static_cast<Eigen::Index>(i)));
  });
  return out;
}

}  // namespace evglm
