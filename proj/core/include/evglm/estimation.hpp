#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evglm/glm.hpp"

namespace evglm {

struct FitConfig {
  double tol_score = 1e-8;
  int max_iter = 200;
  int max_halvings = 30;
};

struct FitIteration {
  int iteration;
  Eigen::VectorXd beta;
  double score_norm;
  double step_norm;
  double loglik;
  int halvings;
};

struct FitResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd fisher;
  Eigen::VectorXd se;  ///< empty unless the Fisher matrix at beta is positive definite
  double loglik = 0;
  double score_norm = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<FitIteration> trace;
};

/// Log-likelihood, summed score and summed Fisher at β.
struct FitTerms {
  double loglik;
  Eigen::VectorXd score;
  Eigen::MatrixXd fisher;
};

/// Throws DomainError naming the offending observation when some y is
/// outside the support at β.
FitTerms fit_terms(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y);

/// β ← β + α I_n(β)⁻¹ Σ_i Λ^P_β(x_i, y_i), α halved while the
/// log-likelihood decreases or an observation leaves the support.
FitResult fisher_scoring_fit(const GlmSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta0, const FitConfig& cfg = {});

/// sqrt(diag I_n(β̂)⁻¹). Throws SingularityError when the Fisher matrix is
/// not positive definite.
Eigen::VectorXd standard_errors(const FitResult& fit);

/// Zero except for the scale intercept (a constant-1 column in the first
/// block) of gevd/gpd models, set so that ℓ_σ gives a moment estimate of
/// scale, and a shape intercept when ξ at zero is outside the domain.
Eigen::VectorXd default_start(const GlmSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Inverse of a scalar link by bracketing and bisection.
double link_inverse(LinkKind kind, double value);

}  // namespace evglm
