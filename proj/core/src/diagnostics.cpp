#include "evglm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "evglm/errors.hpp"
#include "evglm/parallel.hpp"
#include "evglm/special.hpp"

namespace evglm {

namespace {

constexpr int kChunks = 64;

std::vector<double> halving_ladder(double start, int count) {
  std::vector<double> out;
  for (int j = 0; j < count; ++j) out.push_back(std::ldexp(start, -j));
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

std::vector<double> to_std(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Frobenius norm of M_π(C, x, x) from C and the block norms |x_h|².
double core_norm(const ParamMat& C, const ParamVec& sq) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < C.rows(); ++a) {
    for (Eigen::Index b = 0; b < C.cols(); ++b) acc += C(a, b) * C(a, b) * sq(a) * sq(b);
  }
  return std::sqrt(acc);
}

ParamVec block_sq(const PartitionSpec& pi, const Eigen::Ref<const Eigen::VectorXd>& x) {
  ParamVec out(pi.blocks());
  for (int h = 0; h < pi.blocks(); ++h) out(h) = x.segment(pi.offset(h), pi.block_size(h)).squaredNorm();
  return out;
}

ParamVec block_dot(const PartitionSpec& pi, const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b) {
  ParamVec out(pi.blocks());
  for (int h = 0; h < pi.blocks(); ++h) {
    out(h) = a.segment(pi.offset(h), pi.block_size(h)).dot(b.segment(pi.offset(h), pi.block_size(h)));
  }
  return out;
}

struct InverseRoot {
  Eigen::MatrixXd inv_sqrt;
  double condition = 0;
};

InverseRoot inverse_sqrt(const Eigen::MatrixXd& I, const std::string& what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(I);
  if (es.info() != Eigen::Success) throw SingularityError(what + ": eigen decomposition failed", 0.0);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  double cond = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0) || cond > 1e12) {
    throw SingularityError(what + ": total Fisher information is singular (condition number " + num(cond) + ")",
                           cond);
  }
  InverseRoot r;
  r.inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
               es.eigenvectors().transpose();
  r.condition = cond;
  return r;
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

CheckConfig::CheckConfig() : h_ladder(halving_ladder(0.1, 7)), s_ladder(halving_ladder(0.1, 13)) {}

void CheckConfig::validate() const {
  auto decreasing = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw DomainError(std::string(name) + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0) || !std::isfinite(v[i])) throw DomainError(std::string(name) + " entries must be positive");
      if (i && !(v[i] < v[i - 1])) throw DomainError(std::string(name) + " must be strictly decreasing");
    }
  };
  decreasing(h_ladder, "h-ladder");
  decreasing(s_ladder, "s-ladder");
  if (n_ladder.size() < 2) throw DomainError("n-ladder needs at least two sizes");
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    if (n_ladder[i] < 1 || (i && n_ladder[i] <= n_ladder[i - 1])) {
      throw DomainError("n-ladder must be positive and strictly increasing");
    }
  }
  if (draws < 10000) throw DomainError("Monte Carlo draw count must be >= 10000");
  if (!(b > 0)) throw DomainError("t-ball radius b must be positive");
  if (t_grid < 1) throw DomainError("t-grid size must be >= 1");
  if (!(epsilon > 0)) throw DomainError("epsilon must be positive");
  for (double e : epsilon_sweep) {
    if (!(e > 0)) throw DomainError("epsilon sweep entries must be positive");
  }
  if (!(tol_stab > 0) || !(tol_cont > 0)) throw DomainError("tolerances must be positive");
  if (quad_nodes < 10) throw DomainError("quadrature needs at least 10 nodes");
}

// ---------------------------------------------------------------- remainder

double l2_remainder(const ErrorFamily& fam, const ParamVec& theta, const ParamVec& h, int quad_nodes) {
  fam.check_domain(theta);
  if (h.size() != theta.size()) throw DimensionError("h must have the parameter dimension");
  if (h.isZero(0.0)) return 0.0;
  ParamVec th = theta + h;
  fam.check_domain(th);
  auto term = [&](double y) {
    double lq0 = fam.log_density(theta, y);
    double lq1 = fam.log_density(th, y);
    double lin = 0.5 * fam.score(theta, y).dot(h);
    double d = std::expm1(0.5 * (lq1 - lq0)) - lin;
    return std::make_pair(lq0, d * d);
  };
  if (fam.discrete()) {
    auto a = discrete_support(fam, theta);
    auto b = discrete_support(fam, th);
    double ymax = std::max(a.back(), b.back());
    double acc = 0.0, outside = 0.0;
    for (double y = 0; y <= ymax; y += 1.0) {
      double lq0 = fam.log_density(theta, y);
      if (std::isinf(lq0)) {
        outside += std::exp(fam.log_density(th, y));
        continue;
      }
      auto [l, t] = term(y);
      acc += std::exp(l) * t;
    }
    return acc + outside;
  }
  QuantileGrid grid = QuantileGrid::graded(quad_nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double y = fam.quantile(theta, grid.u[i], grid.ubar[i]);
    if (!fam.in_support(theta, y)) continue;
    acc += grid.weight[i] * term(y).second;
  }
  auto [lo, hi] = fam.support(theta);
  if (std::isfinite(lo)) acc += fam.cdf(th, lo);
  if (std::isfinite(hi)) acc += fam.survival(th, hi);
  return acc;
}

ConditionReport check_remainder_rate(const ErrorFamily& fam, const ParamVec& theta, const CheckConfig& cfg) {
  cfg.validate();
  fam.check_domain(theta);
  const int k = fam.k();
  std::vector<ParamVec> dirs;
  for (int i = 0; i < k; ++i) dirs.push_back(ParamVec::Unit(k, i));
  if (k == 1) {
    dirs.push_back(-ParamVec::Unit(1, 0));
  } else {
    dirs.push_back(ParamVec::Ones(k) / std::sqrt(static_cast<double>(k)));
  }
  ConditionReport rep;
  rep.condition = "remainder";
  rep.control_name = "h";
  rep.tolerance = cfg.min_ratio;
  double worst_ratio = std::numeric_limits<double>::infinity();
  std::size_t worst_dir = 0;
  std::ostringstream why;
  Verdict v = Verdict::pass;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    NamedSeries s;
    s.name = "direction " + std::to_string(d + 1) + " " + format_vector(Eigen::VectorXd(dirs[d]));
    for (double hs : cfg.h_ladder) {
      ParamVec h = hs * dirs[d];
      if (!fam.in_domain(theta + h)) {
        rep.witness = to_std(Eigen::VectorXd(h));
        rep.verdict = Verdict::inconclusive;
        rep.diagnostics = "h-ladder leaves the parameter domain at h=" + format_vector(Eigen::VectorXd(h));
        rep.series.push_back(s);
        return rep;
      }
      double r = l2_remainder(fam, theta, h, cfg.quad_nodes);
      s.points.push_back({hs, r / (hs * hs)});
    }
    double dir_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < s.points.size(); ++j) {
      double prev = s.points[j - 1].value, cur = s.points[j].value;
      if (!std::isfinite(prev) || !std::isfinite(cur)) {
        v = Verdict::fail;
        why << "non-finite remainder in direction " << d + 1 << "; ";
        dir_min = -1;
        break;
      }
      if (cur <= 1e-14 || prev <= 1e-14) {
        v = worst(v, Verdict::inconclusive);
        why << "remainder at numerical floor in direction " << d + 1 << "; ";
        continue;
      }
      dir_min = std::min(dir_min, prev / cur);
    }
    if (dir_min < cfg.min_ratio) {
      v = Verdict::fail;
      why << "direction " << d + 1 << " ratio " << num(dir_min) << " < " << num(cfg.min_ratio) << "; ";
    }
    if (dir_min < worst_ratio) {
      worst_ratio = dir_min;
      worst_dir = d;
    }
    rep.series.push_back(std::move(s));
  }
  rep.trajectory = rep.series[worst_dir].points;
  rep.verdict = v;
  rep.diagnostics = why.str() + "worst per-halving decrease " + num(worst_ratio) + " (direction " +
                    std::to_string(worst_dir + 1) + "); trajectory is remainder/|h|^2";
  return rep;
}

// ---------------------------------------------------------------- t-grid

std::vector<Eigen::VectorXd> t_directions(int p, double b, int grid) {
  if (p < 1 || grid < 1 || !(b > 0)) throw DomainError("t-grid needs p >= 1, grid >= 1, b > 0");
  std::vector<Eigen::VectorXd> out;
  if (p == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, -b));
    out.push_back(Eigen::VectorXd::Constant(1, b));
    return out;
  }
  if (p == 2) {
    for (int j = 0; j < grid; ++j) {
      double a = 2.0 * M_PI * j / grid;
      Eigen::VectorXd t(2);
      t << b * std::cos(a), b * std::sin(a);
      out.push_back(t);
    }
    return out;
  }
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                               59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  if (p > 32) throw DimensionError("t-grid supports p <= 32");
  for (int j = 1; j <= grid; ++j) {
    Eigen::VectorXd t(p);
    for (int c = 0; c < p; ++c) {
      double f = 1.0, r = 0.0;
      for (int i = j; i > 0; i /= primes[c]) {
        f /= primes[c];
        r += f * (i % primes[c]);
      }
      t(c) = normal_quantile(std::clamp(r, 1e-12, 1.0 - 1e-12));
    }
    out.push_back(b * t / t.norm());
  }
  return out;
}

// ---------------------------------------------------------------- cond (ii)

double fisher_norm(const GlmSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& beta,
                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  ParamVec theta = linear_predictor(spec, beta, x);
  return core_norm(fisher_core(spec, theta), block_sq(spec.partition(), x));
}

namespace {

struct DrawFailure {
  std::size_t index = std::numeric_limits<std::size_t>::max();
  std::string what;
};

void fail_with_witness(ConditionReport& rep, const Eigen::MatrixXd& X, const DrawFailure& f) {
  rep.verdict = Verdict::fail;
  rep.witness = to_std(X.col(static_cast<Eigen::Index>(f.index)));
  rep.diagnostics = "draw " + std::to_string(f.index + 1) + " at x=" +
                    format_vector(X.col(static_cast<Eigen::Index>(f.index))) + ": " + f.what;
}

}  // namespace

ConditionReport check_cond_ii(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                              const CheckConfig& cfg) {
  cfg.validate();
  if (K.dim() != spec.p()) throw DimensionError("regressor law dimension does not match the partition");
  if (beta.size() != spec.p()) throw DimensionError("beta has the wrong length");
  ConditionReport rep;
  rep.condition = "cond_ii";
  rep.control_name = "N";
  rep.tolerance = cfg.tol_stab;
  const std::size_t N = cfg.draws, total = 4 * N;
  Eigen::MatrixXd X = K.draw_columns(total, cfg.seed);
  std::vector<double> g(total), bound(total);
  std::vector<DrawFailure> failures(kChunks);
  for_each_chunk(kChunks, [&](int c) {
    std::size_t lo = total * c / kChunks, hi = total * (c + 1) / kChunks;
    for (std::size_t i = lo; i < hi; ++i) {
      auto x = X.col(static_cast<Eigen::Index>(i));
      try {
        ParamVec theta = linear_predictor(spec, beta, x);
        ParamVec vt = parameter_from_predictor(spec, theta);
        ParamMat IQ = spec.family().fisher_info(vt);
        ParamVec d = spec.link().jacobian_diag(theta);
        ParamMat C = d.asDiagonal() * IQ * d.asDiagonal();
        g[i] = core_norm(C, block_sq(spec.partition(), x));
        bound[i] = IQ.norm() * d.squaredNorm() * x.squaredNorm();
        if (!std::isfinite(g[i])) {
          failures[c] = {i, "integrand |I^P(x)| is not finite (" + num(g[i]) + ")"};
          return;
        }
      } catch (const Error& e) {
        failures[c] = {i, e.what()};
        return;
      }
    }
  });
  for (const auto& f : failures) {
    if (f.index != std::numeric_limits<std::size_t>::max()) {
      fail_with_witness(rep, X, f);
      return rep;
    }
  }
  long double acc = 0, racc = 0;
  NamedSeries rs{"bound_integrand", {}};
  for (std::size_t i = 0; i < total; ++i) {
    acc += g[i];
    racc += bound[i];
    std::size_t n = i + 1;
    if (n == N || n == 2 * N || n == 4 * N) {
      rep.trajectory.push_back({static_cast<double>(n), static_cast<double>(acc / n)});
      rs.points.push_back({static_cast<double>(n), static_cast<double>(racc / n)});
    }
  }
  rep.series.push_back(rs);

  // Hill estimate of the integrand's tail index from the top k order statistics.
  std::size_t k = std::max<std::size_t>(50, static_cast<std::size_t>(std::sqrt(static_cast<double>(total))));
  k = std::min(k, total - 1);
  std::vector<double> sorted = g;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                   std::greater<double>());
  double thresh = sorted[k];
  double alpha = std::numeric_limits<double>::infinity();
  if (thresh > 0) {
    long double le = 0;
    for (std::size_t i = 0; i < k; ++i) le += std::log(sorted[i] / thresh);
    if (le > 0) alpha = static_cast<double>(k / le);
  }
  rep.series.push_back({"hill_tail_index", {{static_cast<double>(k), alpha}}});

  double m1 = rep.trajectory[0].value, m2 = rep.trajectory[1].value, m4 = rep.trajectory[2].value;
  auto rel = [](double a, double b) {
    double s = std::max(std::abs(a), std::abs(b));
    return s > 0 ? std::abs(a - b) / s : 0.0;
  };
  double r12 = rel(m1, m2), r24 = rel(m2, m4);
  std::ostringstream why;
  why << "running means " << num(m1) << ", " << num(m2) << ", " << num(m4) << " (relative changes " << num(r12)
      << ", " << num(r24) << "); Hill tail index " << num(alpha) << " from top " << k << " of " << total
      << " draws";
  if (alpha <= 1.0) {
    rep.verdict = Verdict::fail;
    why << "; tail index <= 1 indicates an infinite mean";
  } else if (r12 < cfg.tol_stab && r24 < cfg.tol_stab) {
    rep.verdict = Verdict::pass;
  } else {
    rep.verdict = Verdict::inconclusive;
    why << "; running means not stable within " << num(cfg.tol_stab);
  }
  rep.diagnostics = why.str();
  return rep;
}

// ---------------------------------------------------------------- cond (iii)

namespace {

struct CrnSetup {
  Eigen::MatrixXd X;
  Eigen::MatrixXd theta0;  // k×N
  Eigen::MatrixXd sq;      // k×N
  std::vector<double> g0;
};

CrnSetup crn_setup(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                   const CheckConfig& cfg, DrawFailure& failure) {
  CrnSetup s;
  const std::size_t N = cfg.draws;
  const int k = spec.k();
  s.X = K.draw_columns(N, cfg.seed);
  s.theta0.resize(k, static_cast<Eigen::Index>(N));
  s.sq.resize(k, static_cast<Eigen::Index>(N));
  s.g0.resize(N);
  std::vector<DrawFailure> failures(kChunks);
  for_each_chunk(kChunks, [&](int c) {
    std::size_t lo = N * c / kChunks, hi = N * (c + 1) / kChunks;
    for (std::size_t i = lo; i < hi; ++i) {
      auto col = static_cast<Eigen::Index>(i);
      auto x = s.X.col(col);
      try {
        ParamVec th = linear_predictor(spec, beta, x);
        ParamVec sq = block_sq(spec.partition(), x);
        s.theta0.col(col) = th;
        s.sq.col(col) = sq;
        s.g0[i] = core_norm(fisher_core(spec, th), sq);
        if (!std::isfinite(s.g0[i])) {
          failures[c] = {i, "integrand |I^P(x)| is not finite"};
          return;
        }
      } catch (const Error& e) {
        failures[c] = {i, e.what()};
        return;
      }
    }
  });
  for (const auto& f : failures) {
    if (f.index != std::numeric_limits<std::size_t>::max()) {
      failure = f;
      break;
    }
  }
  return s;
}

struct Cell {
  double s;
  int dir;
};

// Chunked sums of | |I^P_{β+st}(x_i)| − |I^P_β(x_i)| | over the stored draws for
// every requested cell; chunk partials are combined in chunk order.
std::vector<double> crn_cell_means(const GlmSpec& spec, const CrnSetup& s, const std::vector<Eigen::VectorXd>& dirs,
                                   const std::vector<Cell>& cells, DrawFailure& failure) {
  const std::size_t N = s.g0.size();
  const PartitionSpec& pi = spec.partition();
  std::vector<std::vector<double>> part(kChunks, std::vector<double>(cells.size(), 0.0));
  std::vector<DrawFailure> failures(kChunks);
  for_each_chunk(kChunks, [&](int c) {
    std::size_t lo = N * c / kChunks, hi = N * (c + 1) / kChunks;
    std::vector<ParamVec> xt(dirs.size());
    auto& acc = part[c];
    for (std::size_t i = lo; i < hi; ++i) {
      auto col = static_cast<Eigen::Index>(i);
      auto x = s.X.col(col);
      for (std::size_t d = 0; d < dirs.size(); ++d) xt[d] = block_dot(pi, x, dirs[d]);
      ParamVec th0 = s.theta0.col(col);
      ParamVec sq = s.sq.col(col);
      for (std::size_t j = 0; j < cells.size(); ++j) {
        ParamVec th = th0 + cells[j].s * xt[static_cast<std::size_t>(cells[j].dir)];
        try {
          double gv = core_norm(fisher_core(spec, th), sq);
          if (!std::isfinite(gv)) throw DomainError("integrand |I^P(x)| is not finite");
          acc[j] += std::abs(gv - s.g0[i]);
        } catch (const Error& e) {
          failures[c] = {i, std::string(e.what()) + " (s=" + num(cells[j].s) + ", direction " +
                                std::to_string(cells[j].dir + 1) + ")"};
          return;
        }
      }
    }
  });
  for (const auto& f : failures) {
    if (f.index != std::numeric_limits<std::size_t>::max()) {
      failure = f;
      break;
    }
  }
  std::vector<double> out(cells.size(), 0.0);
  for (int c = 0; c < kChunks; ++c) {
    for (std::size_t j = 0; j < cells.size(); ++j) out[j] += part[c][j];
  }
  for (double& v : out) v /= static_cast<double>(N);
  return out;
}

}  // namespace

ConditionReport check_cond_iii(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                               const CheckConfig& cfg) {
  cfg.validate();
  if (K.dim() != spec.p()) throw DimensionError("regressor law dimension does not match the partition");
  if (beta.size() != spec.p()) throw DimensionError("beta has the wrong length");
  ConditionReport rep;
  rep.condition = "cond_iii";
  rep.control_name = "s";
  rep.tolerance = cfg.tol_cont;
  DrawFailure failure;
  CrnSetup setup = crn_setup(spec, beta, K, cfg, failure);
  if (failure.index != std::numeric_limits<std::size_t>::max()) {
    fail_with_witness(rep, setup.X, failure);
    return rep;
  }
  auto dirs = t_directions(spec.p(), cfg.b, cfg.t_grid);
  std::vector<Cell> cells;
  std::vector<double> svals = cfg.s_ladder;
  svals.push_back(0.0);
  for (double s : svals) {
    for (int d = 0; d < static_cast<int>(dirs.size()); ++d) cells.push_back({s, d});
  }
  auto means = crn_cell_means(spec, setup, dirs, cells, failure);
  if (failure.index != std::numeric_limits<std::size_t>::max()) {
    fail_with_witness(rep, setup.X, failure);
    return rep;
  }
  std::size_t D = dirs.size();
  for (std::size_t si = 0; si < svals.size(); ++si) {
    double best = -1;
    int arg = 0;
    for (std::size_t d = 0; d < D; ++d) {
      double v = means[si * D + d];
      if (v > best) {
        best = v;
        arg = static_cast<int>(d);
      }
    }
    rep.trajectory.push_back({svals[si], best});
    rep.argmax.push_back(arg);
  }
  // Verdict on the s-ladder proper; the s=0 row is the identity check.
  double first = rep.trajectory.front().value;
  double last = rep.trajectory[svals.size() - 2].value;
  bool monotone = true;
  for (std::size_t i = 1; i + 1 < svals.size(); ++i) {
    if (rep.trajectory[i].value > rep.trajectory[i - 1].value * (1 + 1e-12) + 1e-300) monotone = false;
  }
  std::ostringstream why;
  why << "sup over " << D << " directions on |t|=" << num(cfg.b) << ", " << cfg.draws
      << " common draws; first " << num(first) << ", last " << num(last);
  if (first <= 0) {
    rep.verdict = Verdict::pass;
    why << "; integrand does not move with s";
  } else if (monotone && last <= cfg.tol_cont * first) {
    rep.verdict = Verdict::pass;
  } else if (last >= 0.5 * first) {
    rep.verdict = Verdict::fail;
    why << "; trajectory does not decrease";
  } else {
    rep.verdict = Verdict::inconclusive;
    why << (monotone ? "; decrease not below tolerance" : "; trajectory not monotone");
  }
  why << "; sphere |t|=b stands in for the ball |t|<=b";
  rep.diagnostics = why.str();
  return rep;
}

double cond_iii_cell(const GlmSpec& spec, const Eigen::VectorXd& beta, const RegressorSampler& K,
                     const CheckConfig& cfg, double s, int direction) {
  DrawFailure failure;
  CrnSetup setup = crn_setup(spec, beta, K, cfg, failure);
  if (failure.index != std::numeric_limits<std::size_t>::max()) throw DomainError(failure.what);
  auto dirs = t_directions(spec.p(), cfg.b, cfg.t_grid);
  if (direction < 0 || direction >= static_cast<int>(dirs.size())) throw DomainError("direction index out of range");
  auto means = crn_cell_means(spec, setup, dirs, {{s, direction}}, failure);
  if (failure.index != std::numeric_limits<std::size_t>::max()) throw DomainError(failure.what);
  return means[0];
}

// ---------------------------------------------------------------- decay

Verdict classify_decay(const std::vector<TrajectoryPoint>& traj, std::string* why) {
  auto say = [&](const std::string& s) {
    if (why) *why = s;
  };
  if (traj.size() < 2) {
    say("trajectory too short");
    return Verdict::inconclusive;
  }
  bool all_tiny = true;
  for (const auto& p : traj) {
    if (!std::isfinite(p.value)) {
      say("non-finite statistic at n=" + num(p.control));
      return Verdict::fail;
    }
    if (std::abs(p.value) > 1e-12) all_tiny = false;
  }
  if (all_tiny) {
    say("statistic is zero along the ladder");
    return Verdict::pass;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (traj[i].value > traj[i - 1].value * (1 + 1e-9) + 1e-15) monotone = false;
  }
  double v0 = std::max(std::abs(traj.front().value), 1e-300);
  double v1 = std::max(std::abs(traj.back().value), 1e-300);
  double slope = std::log(v1 / v0) / std::log(traj.back().control / traj.front().control);
  std::string base = "log-log slope " + num(slope) + (monotone ? ", monotone" : ", not monotone");
  if (std::abs(traj.back().value) <= 1e-12 && monotone) {
    say(base + ", reaches zero");
    return Verdict::pass;
  }
  if (monotone && slope <= -0.25) {
    say(base);
    return Verdict::pass;
  }
  if (slope >= -0.1) {
    say(base + ", bounded away from zero");
    return Verdict::fail;
  }
  say(base + ", decay too slow or irregular to certify");
  return Verdict::inconclusive;
}

// ---------------------------------------------------------------- hat matrix

namespace {

// L_i as a p×k matrix.
Eigen::MatrixXd leverage_factor(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::VectorXd& x) {
  ParamVec theta = linear_predictor(spec, beta, x);
  ParamMat IQ = spec.family().fisher_info(parameter_from_predictor(spec, theta));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(IQ)};
  Eigen::MatrixXd root = es.operatorSqrt();
  Eigen::MatrixXd A = root * Eigen::VectorXd(spec.link().jacobian_diag(theta)).asDiagonal();
  return rho_pi_columns(Eigen::MatrixXd(A.transpose()), x, spec.partition());
}

}  // namespace

Eigen::MatrixXd hat_matrix(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design) {
  const int k = spec.k(), p = spec.p();
  const auto n = design.rows();
  Eigen::MatrixXd L(p, n * k);
  for (Eigen::Index i = 0; i < n; ++i) L.middleCols(i * k, k) = leverage_factor(spec, beta, design.row(i).transpose());
  Eigen::MatrixXd I = L * L.transpose();
  auto root = inverse_sqrt(I, "hat matrix");
  Eigen::MatrixXd R = root.inv_sqrt * L;
  return R.transpose() * R;
}

double feller_statistic(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design) {
  const int k = spec.k(), p = spec.p();
  const auto n = design.rows();
  std::vector<Eigen::MatrixXd> Ls(static_cast<std::size_t>(n));
  Eigen::MatrixXd I = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Ls[static_cast<std::size_t>(i)] = leverage_factor(spec, beta, design.row(i).transpose());
    I += Ls[static_cast<std::size_t>(i)] * Ls[static_cast<std::size_t>(i)].transpose();
  }
  auto root = inverse_sqrt(I, "feller");
  double best = 0;
  for (const auto& Li : Ls) {
    Eigen::MatrixXd R = root.inv_sqrt * Li;
    for (int j = 0; j < k; ++j) best = std::max(best, R.col(j).squaredNorm());
  }
  return best;
}

ConditionReport check_feller(const GlmSpec& spec, const Eigen::VectorXd& beta, const DesignSequence& design,
                             const CheckConfig& cfg) {
  cfg.validate();
  ConditionReport rep;
  rep.condition = "feller";
  rep.control_name = "n";
  rep.tolerance = -0.25;
  try {
    for (int n : cfg.n_ladder) {
      rep.trajectory.push_back({static_cast<double>(n), feller_statistic(spec, beta, design.rows(n))});
    }
  } catch (const SingularityError& e) {
    rep.verdict = Verdict::fail;
    rep.diagnostics = e.what();
    return rep;
  } catch (const DomainError& e) {
    rep.verdict = Verdict::fail;
    rep.diagnostics = e.what();
    return rep;
  }
  std::string why;
  rep.verdict = classify_decay(rep.trajectory, &why);
  rep.diagnostics = "max_i H_ii along the n-ladder; " + why;
  return rep;
}

// ---------------------------------------------------------------- Lindeberg

namespace {

struct ScoreTable {
  std::vector<double> weight;
  std::vector<ParamVec> score;
};

ScoreTable score_table(const ErrorFamily& fam, const ParamVec& vt, const QuantileGrid& grid) {
  ScoreTable t;
  if (fam.discrete()) {
    for (double y : discrete_support(fam, vt)) {
      t.weight.push_back(std::exp(fam.log_density(vt, y)));
      t.score.push_back(fam.score(vt, y));
    }
    return t;
  }
  t.weight = grid.weight;
  t.score.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.score.push_back(fam.score(vt, fam.quantile(vt, grid.u[i], grid.ubar[i])));
  }
  return t;
}

std::vector<double> lindeberg_sums(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                                   const std::vector<double>& eps, const CheckConfig& cfg) {
  Eigen::MatrixXd In = total_fisher_design(spec, beta, X);
  auto root = inverse_sqrt(In, "lindeberg");
  auto dirs = t_directions(spec.p(), cfg.b, cfg.t_grid);
  std::vector<Eigen::VectorXd> tn;
  for (const auto& t : dirs) tn.push_back(root.inv_sqrt * t);
  QuantileGrid grid = spec.family().discrete() ? QuantileGrid{} : QuantileGrid::graded(cfg.quad_nodes);
  std::map<std::vector<double>, ScoreTable> cache;
  std::vector<std::vector<double>> acc(eps.size(), std::vector<double>(dirs.size(), 0.0));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::VectorXd x = X.row(i).transpose();
    ParamVec theta = linear_predictor(spec, beta, x);
    ParamVec vt = parameter_from_predictor(spec, theta);
    std::vector<double> key(vt.data(), vt.data() + vt.size());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, score_table(spec.family(), vt, grid)).first;
    const ScoreTable& tab = it->second;
    ParamVec d = spec.link().jacobian_diag(theta);
    for (std::size_t di = 0; di < dirs.size(); ++di) {
      ParamVec v = d.cwiseProduct(block_dot(spec.partition(), tn[di], x));
      for (std::size_t j = 0; j < tab.weight.size(); ++j) {
        double U = tab.score[j].dot(v);
        double U2 = U * U;
        for (std::size_t e = 0; e < eps.size(); ++e) {
          if (std::abs(U) > eps[e]) acc[e][di] += tab.weight[j] * U2;
        }
      }
    }
  }
  std::vector<double> out(eps.size(), 0.0);
  for (std::size_t e = 0; e < eps.size(); ++e) out[e] = *std::max_element(acc[e].begin(), acc[e].end());
  return out;
}

}  // namespace

double lindeberg_sum(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& design,
                     double epsilon, const CheckConfig& cfg) {
  return lindeberg_sums(spec, beta, design, {epsilon}, cfg)[0];
}

ConditionReport check_lindeberg(const GlmSpec& spec, const Eigen::VectorXd& beta, const DesignSequence& design,
                                const CheckConfig& cfg) {
  cfg.validate();
  ConditionReport rep;
  rep.condition = "lindeberg";
  rep.control_name = "n";
  rep.tolerance = -0.25;
  std::vector<double> eps = cfg.epsilon_sweep;
  if (std::find(eps.begin(), eps.end(), cfg.epsilon) == eps.end()) eps.push_back(cfg.epsilon);
  std::vector<NamedSeries> series(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) series[e].name = "epsilon=" + num(eps[e]);
  try {
    for (int n : cfg.n_ladder) {
      auto sums = lindeberg_sums(spec, beta, design.rows(n), eps, cfg);
      for (std::size_t e = 0; e < eps.size(); ++e) series[e].points.push_back({static_cast<double>(n), sums[e]});
    }
  } catch (const SingularityError& e) {
    rep.verdict = Verdict::fail;
    rep.diagnostics = e.what();
    return rep;
  } catch (const DomainError& e) {
    rep.verdict = Verdict::fail;
    rep.diagnostics = e.what();
    return rep;
  }
  Verdict v = Verdict::pass;
  std::ostringstream why;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    std::string w;
    Verdict ve = classify_decay(series[e].points, &w);
    v = worst(v, ve);
    why << series[e].name << ": " << verdict_name(ve) << " (" << w << "); ";
    if (eps[e] == cfg.epsilon) rep.trajectory = series[e].points;
  }
  rep.series = std::move(series);
  rep.verdict = v;
  rep.diagnostics = why.str() + "verdict is the worst over the epsilon sweep";
  return rep;
}

// ---------------------------------------------------------------- info continuity

double info_cont_statistic(const GlmSpec& spec, const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                           const CheckConfig& cfg) {
  Eigen::MatrixXd In = total_fisher_design(spec, beta, X);
  auto root = inverse_sqrt(In, "info_cont_det");
  auto dirs = t_directions(spec.p(), cfg.b, cfg.t_grid);
  std::vector<ParamMat> C0(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    C0[static_cast<std::size_t>(i)] = fisher_core(spec, linear_predictor(spec, beta, X.row(i).transpose()));
  }
  double best = 0;
  for (const auto& t : dirs) {
    Eigen::VectorXd tn = root.inv_sqrt * t;
    Eigen::VectorXd bt = beta + tn;
    double sum = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      Eigen::VectorXd x = X.row(i).transpose();
      ParamMat Ct;
      try {
        Ct = fisher_core(spec, linear_predictor(spec, bt, x));
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at design row " + std::to_string(i + 1) + " x=" +
                              format_vector(x) + ", t_n=" + format_vector(tn),
                          e.distance_to_boundary());
      }
      ParamVec a = block_dot(spec.partition(), tn, x);
      sum += a.dot((Ct - C0[static_cast<std::size_t>(i)]) * a);
    }
    best = std::max(best, std::abs(sum));
  }
  return best;
}

ConditionReport check_info_cont_det(const GlmSpec& spec, const Eigen::VectorXd& beta,
                                    const DesignSequence& design, const CheckConfig& cfg) {
  cfg.validate();
  ConditionReport rep;
  rep.condition = "info_cont_det";
  rep.control_name = "n";
  rep.tolerance = -0.25;
  try {
    for (int n : cfg.n_ladder) {
      rep.trajectory.push_back({static_cast<double>(n), info_cont_statistic(spec, beta, design.rows(n), cfg)});
    }
  } catch (const SingularityError& e) {
    rep.verdict = Verdict::fail;
    rep.diagnostics = e.what();
    return rep;
  } catch (const DomainError& e) {
    rep.verdict = Verdict::fail;
    rep.diagnostics = e.what();
    return rep;
  }
  std::string why;
  rep.verdict = classify_decay(rep.trajectory, &why);
  rep.diagnostics = "sup_t |sum_i t_n'(I_{n,i,t} - I_{n,i,0}) t_n| along the n-ladder; " + why;
  return rep;
}

}  // namespace evglm
