#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evglm/designs.hpp"
#include "evglm/glm.hpp"

namespace evglm {

enum class Verdict { pass, fail, inconclusive };
std::string verdict_name(Verdict v);

struct TrajectoryPoint {
  double control;
  double value;
};

struct NamedSeries {
  std::string name;
  std::vector<TrajectoryPoint> points;
};

struct CheckConfig {
  std::vector<double> h_ladder;  ///< default 0.1·2^(−j), j = 0..6
  std::size_t draws = 100000;    ///< Monte Carlo draw count N
  std::uint64_t seed = 1;
  double b = 1.0;                ///< radius of the t-sphere
  int t_grid = 64;               ///< directions for p >= 2
  std::vector<double> s_ladder;  ///< default 0.1·2^(−j), j = 0..12
  std::vector<int> n_ladder{50, 100, 200, 400};
  double epsilon = 0.5;
  std::vector<double> epsilon_sweep{1.0, 0.5, 0.1};
  double tol_stab = 0.005;
  double tol_cont = 1e-3;
  double min_ratio = 1.5;  ///< remainder decrease per halving
  int quad_nodes = 10000;

  CheckConfig();
  /// Throws DomainError on non-decreasing ladders or N < 10⁴.
  void validate() const;
};

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::inconclusive;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<NamedSeries> series;  ///< extra trajectories (sweeps, directions)
  std::string control_name;
  double tolerance = 0;
  std::string diagnostics;
  std::vector<double> witness;  ///< offending x or parameter, when any
  std::vector<int> argmax;      ///< per-trajectory-point index of the sup direction, when any
};

/// ‖√dQ_{ϑ+h} − √dQ_ϑ (1 + ½ Λᵀh)‖²_{L₂}. Continuous families integrate on
/// the graded quantile grid of Q_ϑ and add the Q_{ϑ+h} mass outside the
/// support of Q_ϑ; discrete families sum until the tail mass is below 1e−12.
double l2_remainder(const ErrorFamily& fam, const ParamVec& theta, const ParamVec& h, int quad_nodes = 10000);

ConditionReport check_remainder_rate(const ErrorFamily& fam, const ParamVec& theta, const CheckConfig& cfg);

/// Directions on the sphere of radius b in ℝᵖ used for sup over |t| <= b.
std::vector<Eigen::VectorXd> t_directions(int p, double b, int grid);

/// |I^P_β(x)|_F, the integrand of condition (ii).
double fisher_norm(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                   const Eigen::Ref<const Eigen::VectorXd>& x);

ConditionReport check_cond_ii(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                              const CheckConfig& cfg);

ConditionReport check_cond_iii(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                               const CheckConfig& cfg);

/// One (s, direction) cell of the cond_iii integral recomputed from the
/// configured seed.
double cond_iii_cell(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                     const CheckConfig& cfg, double s, int direction);

/// H_n = Lᵀ I_n⁻¹ L with L_i = ρ_π(((I^Q_i)^{1/2} ℓ̇_i)ᵀ, x_i); (nk)×(nk).
Eigen::MatrixXd hat_matrix(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design);
double feller_statistic(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design);

ConditionReport check_feller(const GlmSpec& spec, const Eigen::VectorXd& beta, const DesignSequence& design,
                             const CheckConfig& cfg);

/// sup over the t-grid of Σ_i E[U²; |U| > ε], U = t_nᵀ Λ^P_{n,i}.
double lindeberg_sum(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design,
                     double epsilon, const CheckConfig& cfg);

ConditionReport check_lindeberg(const GlmSpec& spec, const Eigen::VectorXd& beta, const DesignSequence& design,
                                const CheckConfig& cfg);

/// sup over the t-grid of |Σ_i t_nᵀ (I^P_{n,i,t} − I^P_{n,i,0}) t_n| with the
/// perturbed parameter β + t_n.
double info_cont_statistic(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design,
                           const CheckConfig& cfg);

ConditionReport check_info_cont_det(const GlmSpec& spec, const Eigen::VectorXd& beta,
                                    const DesignSequence& design, const CheckConfig& cfg);

/// Verdict for a statistic that should decay to 0 along the n-ladder.
Verdict classify_decay(const std::vector<TrajectoryPoint>& traj, std::string* why = nullptr);

}  // namespace evglm
