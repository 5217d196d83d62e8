#include "evglm/designs.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "evglm/errors.hpp"

namespace evglm {

DesignSequence DesignSequence::inverse_n() { return DesignSequence(); }

DesignSequence DesignSequence::sign_grid(int p) {
  if (p < 1 || p > 30) throw DimensionError("sign_grid needs 1 <= p <= 30");
  DesignSequence d;
  d.kind_ = Kind::sign_grid;
  d.p_ = p;
  return d;
}

DesignSequence DesignSequence::leverage_outlier(double scale) {
  if (!std::isfinite(scale)) throw DomainError("leverage_outlier scale must be finite");
  DesignSequence d;
  d.kind_ = Kind::leverage_outlier;
  d.scale_ = scale;
  return d;
}

DesignSequence DesignSequence::sampled(RegressorSampler sampler, std::uint64_t seed) {
  if (sampler.empirical()) throw DomainError("sampled design needs coordinate laws");
  DesignSequence d;
  d.kind_ = Kind::sampled;
  d.p_ = sampler.dim();
  d.seed_ = seed;
  d.laws_ = sampler.laws();
  return d;
}

DesignSequence DesignSequence::fixed(Eigen::MatrixXd rows) {
  if (rows.rows() < 1 || rows.cols() < 1) throw DimensionError("empty design");
  DesignSequence d;
  d.kind_ = Kind::fixed;
  d.p_ = static_cast<int>(rows.cols());
  d.fixed_ = std::move(rows);
  return d;
}

DesignSequence DesignSequence::parse(const std::string& raw, const RegressorSampler* sampler) {
  auto parts = split_top_level(raw);
  if (parts.size() != 1) throw DomainError("design takes a single generator, got '" + raw + "'");
  const std::string& text = parts[0];
  auto open = text.find('(');
  std::string name = open == std::string::npos ? text : text.substr(0, open);
  std::string arg;
  if (open != std::string::npos) {
    if (text.back() != ')') throw DomainError("design '" + text + "' is missing ')'");
    arg = text.substr(open + 1, text.size() - open - 2);
  }
  auto number = [&](const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0) throw DomainError(std::string(what) + " needs a numeric argument");
    return v;
  };
  if (name == "inverse_n" && arg.empty()) return inverse_n();
  if (name == "sign_grid") return sign_grid(arg.empty() ? 1 : static_cast<int>(number("sign_grid")));
  if (name == "leverage_outlier") return leverage_outlier(number("leverage_outlier"));
  if (name == "sampled") {
    if (!sampler) throw DomainError("sampled design needs regressors");
    return sampled(*sampler, static_cast<std::uint64_t>(number("sampled")));
  }
  throw DomainError("unknown design '" + text + "'");
}

int DesignSequence::dim() const { return p_; }

Eigen::Index DesignSequence::max_rows() const {
  return kind_ == Kind::fixed ? fixed_.rows() : std::numeric_limits<Eigen::Index>::max();
}

std::string DesignSequence::to_string() const {
  switch (kind_) {
    case Kind::inverse_n: return "inverse_n";
    case Kind::sign_grid: return "sign_grid(" + std::to_string(p_) + ")";
    case Kind::leverage_outlier: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "leverage_outlier(%.17g)", scale_);
      return buf;
    }
    case Kind::sampled: return "sampled(" + std::to_string(seed_) + ")";
    case Kind::fixed: return "fixed(" + std::to_string(fixed_.rows()) + ")";
  }
  return "";
}

Eigen::MatrixXd DesignSequence::rows(int n) const {
  if (n < 1) throw DomainError("design size must be >= 1");
  Eigen::MatrixXd X(n, p_);
  switch (kind_) {
    case Kind::inverse_n: X.setConstant(1.0 / n); break;
    case Kind::sign_grid:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p_; ++j) X(i, j) = ((i >> j) & 1) ? -1.0 : 1.0;
      }
      break;
    case Kind::leverage_outlier:
      X.setOnes();
      X(n - 1, 0) = scale_;
      break;
    case Kind::sampled: {
      // Row i always comes from the same substream so that designs for
      // different n are prefixes of each other.
      RegressorSampler s(laws_);
      Rng rng(seed_, 7);
      Eigen::VectorXd x(p_);
      for (int i = 0; i < n; ++i) {
        s.draw(rng, x);
        X.row(i) = x.transpose();
      }
      break;
    }
    case Kind::fixed:
      if (n > fixed_.rows()) {
        throw DimensionError("design has " + std::to_string(fixed_.rows()) + " rows, requested " +
                             std::to_string(n));
      }
      X = fixed_.topRows(n);
      break;
  }
  return X;
}

}  // namespace evglm
