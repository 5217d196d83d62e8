#include "evglm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "evglm/errors.hpp"

namespace evglm {

FitTerms fit_terms(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y) {
  const int p = spec.p();
  FitTerms t{0.0, Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::VectorXd x = X.row(i).transpose();
    double lq = glm_log_density(spec, beta, x, y(i));
    if (!std::isfinite(lq)) {
      std::ostringstream os;
      os.precision(17);
      os << "observation " << i + 1 << " (y=" << y(i) << ") is outside the support at beta="
         << format_vector(beta);
      throw DomainError(os.str());
    }
    t.loglik += lq;
    t.score += glm_score(spec, beta, x, y(i));
    t.fisher += per_x_fisher(spec, beta, x);
  }
  return t;
}

namespace {

double condition_number(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

FitResult fisher_scoring_fit(const GlmSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta0, const FitConfig& cfg) {
  if (X.rows() < 1) throw DomainError("no observations to fit");
  if (X.cols() != spec.p()) throw DimensionError("data has the wrong number of regressor columns");
  if (y.size() != X.rows()) throw DimensionError("response length does not match the design");
  if (beta0.size() != spec.p()) throw DimensionError("start vector has the wrong length");
  FitResult res;
  Eigen::VectorXd beta = beta0;
  FitTerms cur = fit_terms(spec, beta, X, y);
  for (int it = 0;; ++it) {
    double snorm = cur.score.norm();
    res.trace.push_back({it, beta, snorm, 0.0, cur.loglik, 0});
    if (snorm <= cfg.tol_score) {
      res.converged = true;
      res.message = "score norm below tolerance";
      break;
    }
    if (it == cfg.max_iter) {
      res.message = "iteration limit reached";
      break;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cur.fisher);
    if (llt.info() != Eigen::Success) {
      res.message = "Fisher information not positive definite (condition number " +
                    std::to_string(condition_number(cur.fisher)) + ")";
      break;
    }
    Eigen::VectorXd step = llt.solve(cur.score);
    double alpha = 1.0;
    bool accepted = false;
    std::string last_problem;
    int h = 0;
    for (; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
      Eigen::VectorXd cand = beta + alpha * step;
      try {
        FitTerms next = fit_terms(spec, cand, X, y);
        double slack = 1e-10 * (1.0 + std::abs(cur.loglik));
        if (next.loglik >= cur.loglik - slack) {
          beta = cand;
          cur = std::move(next);
          accepted = true;
          break;
        }
        last_problem = "log-likelihood decreased";
      } catch (const DomainError& e) {
        last_problem = e.what();
      } catch (const SingularityError& e) {
        last_problem = e.what();
      }
    }
    if (!accepted) {
      res.message = "step rejected after " + std::to_string(cfg.max_halvings) + " halvings: " + last_problem;
      break;
    }
    res.trace.back().step_norm = alpha * step.norm();
    res.trace.back().halvings = h;
  }
  res.beta = beta;
  res.fisher = cur.fisher;
  res.loglik = cur.loglik;
  res.score_norm = cur.score.norm();
  res.iterations = static_cast<int>(res.trace.size()) - 1;
  Eigen::LLT<Eigen::MatrixXd> llt(res.fisher);
  if (llt.info() == Eigen::Success) {
    res.se = standard_errors(res);
  } else {
    if (res.converged) {
      res.message = "Fisher information at the estimate not positive definite (condition number " +
                    std::to_string(condition_number(res.fisher)) + ")";
    }
    res.converged = false;
  }
  return res;
}

Eigen::VectorXd standard_errors(const FitResult& fit) {
  Eigen::LLT<Eigen::MatrixXd> llt(fit.fisher);
  if (fit.fisher.size() == 0 || llt.info() != Eigen::Success) {
    throw SingularityError("Fisher information is not positive definite", 0.0);
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(fit.fisher.rows(), fit.fisher.cols()));
  return inv.diagonal().cwiseSqrt();
}

double link_inverse(LinkKind kind, double value) {
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200 && link_value(kind, lo) > value; ++i) lo *= 2;
  for (int i = 0; i < 200 && link_value(kind, hi) < value; ++i) hi *= 2;
  if (!(link_value(kind, lo) <= value && value <= link_value(kind, hi))) {
    throw DomainError("value outside the range of link " + link_name(kind));
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (link_value(kind, mid) < value ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

int constant_column(const Eigen::MatrixXd& X, int offset, int size) {
  for (int j = offset; j < offset + size; ++j) {
    if ((X.col(j).array() == 1.0).all()) return j;
  }
  return -1;
}

}  // namespace

Eigen::VectorXd default_start(const GlmSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.p());
  FamilyKind kind = spec.family().kind();
  if (kind != FamilyKind::gevd && kind != FamilyKind::gpd) return beta;
  if (X.rows() < 2) return beta;
  const PartitionSpec& pi = spec.partition();
  int js = constant_column(X, pi.offset(0), pi.block_size(0));
  if (js >= 0) {
    double scale;
    if (kind == FamilyKind::gpd) {
      scale = y.mean();
    } else {
      double m = y.mean();
      double var = (y.array() - m).square().sum() / static_cast<double>(y.size() - 1);
      scale = std::sqrt(6.0 * var) / M_PI;
    }
    if (std::isfinite(scale) && scale > 0) {
      try {
        beta(js) = link_inverse(spec.link().kinds()[0], scale);
      } catch (const DomainError&) {
      }
    }
  }
  int jx = constant_column(X, pi.offset(1), pi.block_size(1));
  if (jx >= 0) {
    ParamVec th(2);
    th << 0.0, 0.0;
    ParamVec vt = spec.link().apply(th);
    vt(0) = 1.0;
    if (!spec.family().in_domain(vt)) {
      try {
        beta(jx) = link_inverse(spec.link().kinds()[1], 0.1);
      } catch (const DomainError&) {
      }
    }
  }
  return beta;
}

}  // namespace evglm
