#include "evglm/glm.hpp"

#include <cmath>
#include <sstream>

#include "evglm/errors.hpp"
#include "evglm/parallel.hpp"

namespace evglm {

GlmSpec::GlmSpec(ErrorFamily family, LinkFunction link, PartitionSpec partition)
    : family_(std::move(family)), link_(std::move(link)), partition_(std::move(partition)) {
  if (link_.k() != family_.k()) {
    throw DimensionError("link has " + std::to_string(link_.k()) + " coordinates but " + family_.name() +
                         " has parameter dimension " + std::to_string(family_.k()));
  }
  if (partition_.blocks() != family_.k()) {
    throw DimensionError("partition has " + std::to_string(partition_.blocks()) + " blocks but " +
                         family_.name() + " has parameter dimension " + std::to_string(family_.k()));
  }
}

std::string format_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

ParamVec linear_predictor(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const Eigen::Ref<const Eigen::VectorXd>& x) {
  const PartitionSpec& pi = spec.partition();
  if (beta.size() != pi.dim()) {
    throw DimensionError("beta needs length " + std::to_string(pi.dim()) + ", got " + std::to_string(beta.size()));
  }
  if (x.size() != pi.dim()) {
    throw DimensionError("regressor needs length " + std::to_string(pi.dim()) + ", got " + std::to_string(x.size()));
  }
  ParamVec theta(pi.blocks());
  for (int h = 0; h < pi.blocks(); ++h) {
    theta(h) = x.segment(pi.offset(h), pi.block_size(h)).dot(beta.segment(pi.offset(h), pi.block_size(h)));
  }
  return theta;
}

ParamVec parameter_from_predictor(const GlmSpec& spec, const ParamVec& theta) {
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta(i))) {
      throw DomainError("linear predictor is not finite: theta=" + format_vector(theta), -INFINITY);
    }
  }
  ParamVec vartheta = spec.link().apply(theta);
  double d = spec.family().domain_distance(vartheta);
  if (!(d > 0)) {
    throw DomainError("link " + spec.link().to_string() + " maps theta=" + format_vector(theta) +
                          " to " + format_vector(vartheta) + ", outside the " + spec.family().name() +
                          " domain " + spec.family().domain_text(),
                      d);
  }
  return vartheta;
}

ParamMat fisher_core(const GlmSpec& spec, const ParamVec& theta) {
  // Hot path of the Monte Carlo checks: evaluate the link once per
  // coordinate and fall back to the descriptive error path only on failure.
  const int k = spec.k();
  if (theta.size() != k) throw DimensionError("linear predictor has the wrong length");
  ParamVec vt(k), d(k);
  const auto& kinds = spec.link().kinds();
  for (int i = 0; i < k; ++i) {
    vt(i) = link_value(kinds[static_cast<std::size_t>(i)], theta(i));
    d(i) = link_deriv(kinds[static_cast<std::size_t>(i)], theta(i));
  }
  if (!theta.allFinite() || !(spec.family().domain_distance(vt) > 0)) parameter_from_predictor(spec, theta);
  ParamMat I = spec.family().fisher_info_unchecked(vt);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) I(a, b) *= d(a) * d(b);
  }
  return I;
}

double glm_log_density(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                       const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  ParamVec theta = linear_predictor(spec, beta, x);
  return spec.family().log_density(parameter_from_predictor(spec, theta), y);
}

Eigen::VectorXd glm_score(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  ParamVec theta = linear_predictor(spec, beta, x);
  ParamVec sq = spec.family().score(parameter_from_predictor(spec, theta), y);
  ParamVec c = spec.link().jacobian_diag(theta).cwiseProduct(sq);
  return rho_pi(Eigen::VectorXd(c), x, spec.partition());
}

Eigen::MatrixXd per_x_fisher(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                             const Eigen::Ref<const Eigen::VectorXd>& x) {
  ParamVec theta = linear_predictor(spec, beta, x);
  return m_pi(Eigen::MatrixXd(fisher_core(spec, theta)), x, x, spec.partition());
}

namespace {

constexpr int kFisherChunks = 64;

}  // namespace

FisherEstimate total_fisher_mc(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                               const RegressorSampler& sampler, std::size_t draws, std::uint64_t seed) {
  if (draws < 2) throw DomainError("Monte Carlo Fisher needs at least 2 draws");
  if (sampler.dim() != spec.p()) {
    throw DimensionError("regressor sampler has dimension " + std::to_string(sampler.dim()) +
                         ", partition needs " + std::to_string(spec.p()));
  }
  const int p = spec.p();
  Eigen::VectorXd b = beta;
  std::vector<Eigen::MatrixXd> s1(kFisherChunks, Eigen::MatrixXd::Zero(p, p));
  std::vector<Eigen::MatrixXd> s2(kFisherChunks, Eigen::MatrixXd::Zero(p, p));
  for_each_chunk(kFisherChunks, [&](int c) {
    std::size_t lo = draws * c / kFisherChunks, hi = draws * (c + 1) / kFisherChunks;
    Rng rng(seed, 1000 + static_cast<std::uint64_t>(c));
    Eigen::VectorXd x(p);
    for (std::size_t i = lo; i < hi; ++i) {
      sampler.draw(rng, x);
      Eigen::MatrixXd F;
      try {
        F = per_x_fisher(spec, b, x);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at regressor draw x=" + format_vector(x),
                          e.distance_to_boundary());
      }
      s1[c] += F;
      s2[c] += F.cwiseProduct(F);
    }
  });
  Eigen::MatrixXd t1 = Eigen::MatrixXd::Zero(p, p), t2 = Eigen::MatrixXd::Zero(p, p);
  for (int c = 0; c < kFisherChunks; ++c) {
    t1 += s1[c];
    t2 += s2[c];
  }
  double N = static_cast<double>(draws);
  FisherEstimate est;
  est.draws = draws;
  est.mean = t1 / N;
  est.se = ((t2 / N - est.mean.cwiseProduct(est.mean)).cwiseMax(0.0) / (N - 1.0)).cwiseSqrt();
  return est;
}

Eigen::MatrixXd total_fisher_design(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                                    const Eigen::Ref<const Eigen::MatrixXd>& design) {
  if (design.cols() != spec.p()) {
    throw DimensionError("design has " + std::to_string(design.cols()) + " columns, partition needs " +
                         std::to_string(spec.p()));
  }
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(spec.p(), spec.p());
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    Eigen::VectorXd x = design.row(i).transpose();
    try {
      total += per_x_fisher(spec, beta, x);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at design row " + std::to_string(i + 1) + " x=" +
                            format_vector(x),
                        e.distance_to_boundary());
    }
  }
  return total;
}

}  // namespace evglm
