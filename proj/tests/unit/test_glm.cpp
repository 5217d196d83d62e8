#include <gtest/gtest.h>

#include <cmath>

#include "evglm/designs.hpp"
#include "evglm/errors.hpp"
#include "evglm/glm.hpp"
#include "evglm/regressors.hpp"
#include "oracles.hpp"

using namespace evglm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd v(std::initializer_list<double> x) {
  VectorXd out(static_cast<Eigen::Index>(x.size()));
  Eigen::Index i = 0;
  for (double d : x) out(i++) = d;
  return out;
}

GlmSpec poisson_log(int p) { return GlmSpec(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(p)); }

}  // namespace

TEST(Glm, SpecValidatesDimensions) {
  EXPECT_THROW(GlmSpec(ErrorFamily::gevd(), LinkFunction::parse("log"), PartitionSpec({1, 1})), DimensionError);
  EXPECT_THROW(GlmSpec(ErrorFamily::gevd(), LinkFunction::parse("log,shape_gevd"), PartitionSpec({2})),
               DimensionError);
  GlmSpec s(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec({3}));
  EXPECT_THROW(linear_predictor(s, v({1, 2}), v({1, 2})), DimensionError);
}

TEST(Glm, LinearPredictorExamples) {
  GlmSpec s(ErrorFamily::gevd(), LinkFunction::parse("log,shape_gevd"), PartitionSpec({1, 1}));
  ParamVec t = linear_predictor(s, v({2, 3}), v({5, 7}));
  EXPECT_EQ(t(0), 10);
  EXPECT_EQ(t(1), 21);
  EXPECT_EQ(linear_predictor(s, v({0, 0}), v({5, 7})).norm(), 0);
  GlmSpec s2(ErrorFamily::gevd(), LinkFunction::parse("log,shape_gevd"), PartitionSpec({2, 1}));
  ParamVec t2 = linear_predictor(s2, v({4, 5, 6}), v({1, 2, 3}));
  EXPECT_EQ(t2(0), 14);
  EXPECT_EQ(t2(1), 18);
}

TEST(Glm, ScoreExamples) {
  EXPECT_NEAR(glm_score(poisson_log(1), v({0}), v({1}), 2)(0), 1, 1e-15);
  GlmSpec b(ErrorFamily::binomial(1), LinkFunction::parse("logit"), PartitionSpec::single(1));
  EXPECT_NEAR(glm_score(b, v({0}), v({1}), 1)(0), 0.5, 1e-15);
  // y = λ makes the Poisson score vanish.
  EXPECT_EQ(glm_score(poisson_log(2), v({0, 0}), v({0.3, 2}), 1).norm(), 0);
}

TEST(Glm, PerXFisherExamples) {
  MatrixXd F = per_x_fisher(poisson_log(2), v({0, 0}), v({1, 2}));
  MatrixXd want(2, 2);
  want << 1, 2, 2, 4;
  EXPECT_TRUE(F.isApprox(want, 1e-15));
  GlmSpec b(ErrorFamily::binomial(1), LinkFunction::parse("logit"), PartitionSpec::single(1));
  EXPECT_NEAR(per_x_fisher(b, v({0}), v({1}))(0, 0), 0.25, 1e-15);
  EXPECT_EQ(per_x_fisher(poisson_log(2), v({0.4, -1}), v({0, 0})).norm(), 0);
  // Poisson log: I^Q ℓ̇² = λ; binomial logit: m p(1−p).
  EXPECT_NEAR(fisher_core(poisson_log(1), ParamVec::Constant(1, 0.7))(0, 0), std::exp(0.7), 1e-13);
  GlmSpec b5(ErrorFamily::binomial(5), LinkFunction::parse("logit"), PartitionSpec::single(1));
  double p = 1 / (1 + std::exp(-0.7));
  EXPECT_NEAR(fisher_core(b5, ParamVec::Constant(1, 0.7))(0, 0), 5 * p * (1 - p), 1e-13);
}

TEST(Glm, TotalFisherDesignAndMc) {
  MatrixXd rows(2, 1);
  rows << 1, 1;
  EXPECT_NEAR(total_fisher_design(poisson_log(1), v({0}), rows)(0, 0), 2, 1e-15);

  GlmSpec pid(ErrorFamily::poisson(), LinkFunction::parse("identity"), PartitionSpec::single(1));
  for (int n : {1, 7, 50, 400}) {
    EXPECT_NEAR(total_fisher_design(pid, v({1}), DesignSequence::inverse_n().rows(n))(0, 0), 1, 1e-12);
  }

  GlmSpec lin(ErrorFamily::gauss_loc(1), LinkFunction::parse("identity"), PartitionSpec::single(1));
  RegressorSampler K = RegressorSampler::parse("normal(0, 1)");
  FisherEstimate a = total_fisher_mc(lin, v({0.3}), K, 200000, 1);
  EXPECT_LT(std::abs(a.mean(0, 0) - 1), 3 * a.se(0, 0));
  FisherEstimate b = total_fisher_mc(lin, v({0.3}), K, 200000, 2);
  EXPECT_LT(std::abs(a.mean(0, 0) - b.mean(0, 0)), 3 * std::hypot(a.se(0, 0), b.se(0, 0)));
  FisherEstimate a2 = total_fisher_mc(lin, v({0.3}), K, 200000, 1);
  EXPECT_EQ(a.mean, a2.mean);
}

TEST(Glm, DomainViolationNamesTheDraw) {
  GlmSpec pid(ErrorFamily::poisson(), LinkFunction::parse("identity"), PartitionSpec::single(1));
  RegressorSampler K = RegressorSampler::parse("normal(0, 1)");
  try {
    total_fisher_mc(pid, v({1}), K, 10000, 1);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("draw x=("), std::string::npos) << e.what();
  }
}

namespace {

struct Pairing {
  ErrorFamily fam;
  const char* link;
};

std::vector<Pairing> pairings() {
  return {
      {ErrorFamily::gevd(), "log,shape_gevd"},         {ErrorFamily::gevd(), "log,shape_gevd_shifted"},
      {ErrorFamily::gevd(), "shape_gevd_shifted,log"}, {ErrorFamily::gpd(), "log,shape_gpd"},
      {ErrorFamily::gpd(), "log,binomial_rescaled"},   {ErrorFamily::gpd(), "log,identity"},
      {ErrorFamily::poisson(), "log"},                 {ErrorFamily::poisson(), "shape_gevd_shifted"},
      {ErrorFamily::binomial(1), "logit"},             {ErrorFamily::binomial(4), "logit"},
      {ErrorFamily::gauss_loc(1), "identity"},         {ErrorFamily::gauss_loc(0.5), "log"},
  };
}

}  // namespace

// Chain-rule oracle: analytic score vs finite-difference gradient in β.
TEST(GlmProperty, ScoreMatchesFiniteDifferenceGradient) {
  oracle::Gen g(31);
  int checked = 0;
  while (checked < 240) {
    for (const auto& pr : pairings()) {
      LinkFunction L = LinkFunction::parse(pr.link);
      const int k = pr.fam.k();
      GlmSpec spec(pr.fam, L, PartitionSpec(g.partition(k, 3)));
      VectorXd beta = g.vec(spec.p(), -0.4, 0.4), x = g.vec(spec.p(), -1, 1);
      ParamVec th = linear_predictor(spec, beta, x);
      ParamVec vt = L.apply(th);
      if (!pr.fam.in_domain(vt)) continue;
      if (pr.fam.kind() == FamilyKind::gevd && std::abs(vt(1)) < 0.02) continue;
      if (pr.fam.kind() == FamilyKind::gpd && vt(1) < -0.45) continue;
      double y = pr.fam.quantile(vt, g.uniform(0.05, 0.95));
      VectorXd s = glm_score(spec, beta, x, y);
      VectorXd fd = oracle::fd_gradient([&](const VectorXd& b) { return glm_log_density(spec, b, x, y); }, beta);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        ASSERT_NEAR(s(i), fd(i), 1e-5) << pr.fam.name() << " " << pr.link << " y=" << y;
      }
      ++checked;
    }
  }
}

TEST(GlmProperty, ConditionalCenteringAndPerXFisher) {
  GlmSpec spec(ErrorFamily::gpd(), LinkFunction::parse("log,shape_gpd"), PartitionSpec({2, 1}));
  VectorXd beta = v({0.2, -0.3, 0.4}), x = v({1, 0.5, -0.8});
  ParamVec vt = parameter_from_predictor(spec, linear_predictor(spec, beta, x));
  const int N = 400000;
  Rng rng(77);
  VectorXd mean = VectorXd::Zero(3);
  MatrixXd cov = MatrixXd::Zero(3, 3), cov2 = MatrixXd::Zero(3, 3);
  std::vector<VectorXd> draws;
  for (int i = 0; i < N; ++i) {
    VectorXd s = glm_score(spec, beta, x, spec.family().quantile(vt, rng.uniform()));
    mean += s;
    MatrixXd o = s * s.transpose();
    cov += o;
    cov2 += o.cwiseProduct(o);
  }
  mean /= N;
  cov /= N;
  MatrixXd se = ((cov2 / N - cov.cwiseProduct(cov)) / N).cwiseSqrt();
  MatrixXd F = per_x_fisher(spec, beta, x);
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(mean(i)), 3 * std::sqrt(cov(i, i) / N));
  EXPECT_LE((cov - F).norm(), std::max(0.02 * F.norm(), 3 * se.norm()));
}
