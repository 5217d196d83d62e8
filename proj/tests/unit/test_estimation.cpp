#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evglm/errors.hpp"
#include "evglm/estimation.hpp"
#include "evglm/glm.hpp"
#include "evglm/rng.hpp"
#include "oracles.hpp"

using namespace evglm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Data {
  MatrixXd X;
  VectorXd y;
};

Data poisson_data(int n, const VectorXd& beta, std::uint64_t seed) {
  Rng rng(seed);
  Data d{MatrixXd(n, 2), VectorXd(n)};
  auto fam = ErrorFamily::poisson();
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = rng.normal();
    d.X(i, 1) = rng.normal();
    double lam = std::exp(d.X.row(i).dot(beta));
    d.y(i) = fam.quantile(ParamVec::Constant(1, lam), rng.uniform());
  }
  return d;
}

}  // namespace

TEST(Estimation, GaussIdentityEqualsOls) {
  GlmSpec spec(ErrorFamily::gauss_loc(1), LinkFunction::parse("identity"), PartitionSpec::single(3));
  oracle::Gen g(41);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 200;
    MatrixXd X(n, 3);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1;
      X(i, 1) = g.normal();
      X(i, 2) = g.uniform(-2, 2);
      y(i) = 0.5 - X(i, 1) + 2 * X(i, 2) + g.normal();
    }
    VectorXd start = g.vec(3, -5, 5);
    FitResult fit = fisher_scoring_fit(spec, X, y, start);
    ASSERT_TRUE(fit.converged) << fit.message;
    VectorXd ols = oracle::ols(X, y);
    ASSERT_LE((fit.beta - ols).cwiseAbs().maxCoeff(), 1e-8);
    // One scoring step lands on the OLS solution.
    ASSERT_LE((fit.trace.at(1).beta - ols).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Estimation, SaturatedPoissonIdentity) {
  GlmSpec spec(ErrorFamily::poisson(), LinkFunction::parse("identity"), PartitionSpec::single(1));
  MatrixXd X(1, 1);
  X << 1;
  VectorXd y(1);
  y << 3;
  FitResult fit = fisher_scoring_fit(spec, X, y, VectorXd::Constant(1, 1.0));
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.beta(0), 3, 1e-10);
}

TEST(Estimation, StandardErrorClosedForms) {
  GlmSpec spec(ErrorFamily::gauss_loc(1), LinkFunction::parse("identity"), PartitionSpec::single(2));
  const int n = 64;
  MatrixXd X(n, 2);
  for (int i = 0; i < n; ++i) X.row(i) << (i % 2 ? 1 : -1), (i / 2 % 2 ? 1 : -1);
  VectorXd y = VectorXd::LinSpaced(n, -1, 1);
  FitResult fit = fisher_scoring_fit(spec, X, y, VectorXd::Zero(2));
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.se(0), 1 / std::sqrt(64.0), 1e-12);
  EXPECT_NEAR(fit.se(1), 1 / std::sqrt(64.0), 1e-12);

  GlmSpec one(ErrorFamily::gauss_loc(1), LinkFunction::parse("identity"), PartitionSpec::single(1));
  MatrixXd x1 = X.col(0);
  FitResult a = fisher_scoring_fit(one, x1, y, VectorXd::Zero(1));
  FitResult b = fisher_scoring_fit(one, 3 * x1, y, VectorXd::Zero(1));
  EXPECT_NEAR(b.se(0), a.se(0) / 3, 1e-14);
}

TEST(Estimation, PoissonSeMatchesNumericHessian) {
  GlmSpec spec(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(2));
  Data d = poisson_data(500, (VectorXd(2) << 0.5, -0.3).finished(), 5);
  FitResult fit = fisher_scoring_fit(spec, d.X, d.y, VectorXd::Zero(2));
  ASSERT_TRUE(fit.converged);
  EXPECT_LE(fit.score_norm, FitConfig{}.tol_score);
  auto ll = [&](const VectorXd& b) { return fit_terms(spec, b, d.X, d.y).loglik; };
  MatrixXd H(2, 2);
  const double h = 1e-4;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      VectorXd pp = fit.beta, pm = fit.beta, mp = fit.beta, mm = fit.beta;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      H(i, j) = (ll(pp) - ll(pm) - ll(mp) + ll(mm)) / (4 * h * h);
    }
  }
  VectorXd se_ref = (-H).inverse().diagonal().cwiseSqrt();
  EXPECT_LE((fit.se - se_ref).cwiseAbs().maxCoeff(), 1e-5 * se_ref.maxCoeff());
}

TEST(Estimation, TraceIsMonotoneAndOrderInvariant) {
  GlmSpec spec(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(2));
  Data d = poisson_data(300, (VectorXd(2) << 1.0, 0.8).finished(), 6);
  FitResult fit = fisher_scoring_fit(spec, d.X, d.y, (VectorXd(2) << -2, 2).finished());
  ASSERT_TRUE(fit.converged);
  double prev = fit_terms(spec, (VectorXd(2) << -2, 2).finished(), d.X, d.y).loglik;
  for (const auto& it : fit.trace) {
    EXPECT_GE(it.loglik, prev - 1e-9 * (1 + std::abs(prev)));
    prev = it.loglik;
  }
  std::vector<int> perm(d.y.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  MatrixXd Xp(d.X.rows(), 2);
  VectorXd yp(d.y.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    Xp.row(i) = d.X.row(perm[i]);
    yp(i) = d.y(perm[i]);
  }
  FitResult fp = fisher_scoring_fit(spec, Xp, yp, (VectorXd(2) << -2, 2).finished());
  EXPECT_LE((fp.beta - fit.beta).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Estimation, GpdRecoveryFromDefaultStart) {
  GlmSpec spec(ErrorFamily::gpd(), LinkFunction::parse("log,shape_gpd"), PartitionSpec({2, 1}));
  const int n = 4000;
  VectorXd beta(3);
  beta << 0.3, 0.2, 0.2;
  Rng rng(8);
  MatrixXd X(n, 3);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) << 1, rng.normal(), 1;
    ParamVec th = parameter_from_predictor(spec, linear_predictor(spec, beta, X.row(i).transpose()));
    y(i) = spec.family().quantile(th, rng.uniform());
  }
  FitResult fit = fisher_scoring_fit(spec, X, y, default_start(spec, X, y));
  ASSERT_TRUE(fit.converged) << fit.message;
  for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(fit.beta(j) - beta(j)), 4 * fit.se(j));
}

TEST(Estimation, LinkInverse) {
  for (LinkKind kind : all_link_kinds()) {
    for (double u : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
      EXPECT_NEAR(link_inverse(kind, link_value(kind, u)), u, 1e-9) << link_name(kind);
    }
  }
  EXPECT_THROW(link_inverse(LinkKind::log, -1), DomainError);
}

TEST(Estimation, BadInputs) {
  GlmSpec spec(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(1));
  MatrixXd X(2, 1);
  X << 1, 1;
  VectorXd y(2);
  y << 1, -1;
  EXPECT_THROW(fit_terms(spec, VectorXd::Zero(1), X, y), DomainError);
  EXPECT_THROW(fisher_scoring_fit(spec, X, VectorXd::Zero(3), VectorXd::Zero(1)), DimensionError);
}
