// Acceptance run: one PASS/FAIL line per criterion.
//
//   evglm_acceptance [--only AC3,AC5] [--known-failures AC4]
//
// Exit status is 0 when the failing criteria are exactly the declared known
// failures (an unexpected pass is reported too), 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evglm/designs.hpp"
#include "evglm/diagnostics.hpp"
#include "evglm/error_models.hpp"
#include "evglm/errors.hpp"
#include "evglm/estimation.hpp"
#include "evglm/glm.hpp"
#include "evglm/links.hpp"
#include "evglm/quadrature.hpp"
#include "evglm/regressors.hpp"
#include "evglm/ts_sim.hpp"
#include "oracles.hpp"

using namespace evglm;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

ParamVec pv(double a, double b) {
  ParamVec v(2);
  v << a, b;
  return v;
}

VectorXd vec(std::initializer_list<double> x) {
  VectorXd out(static_cast<Eigen::Index>(x.size()));
  Eigen::Index i = 0;
  for (double d : x) out(i++) = d;
  return out;
}

std::vector<std::pair<ErrorFamily, ParamVec>> fisher_grid() {
  std::vector<std::pair<ErrorFamily, ParamVec>> g;
  for (double s : {0.5, 1.0, 2.0}) {
    for (double xi : {-0.3, 0.0, 0.5, 1.0}) g.push_back({ErrorFamily::gpd(), pv(s, xi)});
  }
  for (double s : {0.5, 1.0, 2.0}) {
    for (double xi : {-0.4, 0.2, 0.5, 1.0}) g.push_back({ErrorFamily::gevd(), pv(s, xi)});
  }
  return g;
}

Outcome ac1() {
  auto t0 = Clock::now();
  double worst = 0;
  std::string where;
  std::uint64_t seed = 20240101;
  for (auto& [fam, th] : fisher_grid()) {
    ParamMat I = fam.fisher_info(th);
    ScoreMoments m = is_score_moments(fam, th, 1000000, seed++);
    double tol = std::max(0.02 * I.norm(), 3 * m.cov_se.norm());
    double ratio = (m.cov - I).norm() / tol;
    if (ratio > worst) {
      worst = ratio;
      where = fmt("%s(%g, %g)", fam.name().c_str(), th(0), th(1));
    }
  }
  double secs = seconds_since(t0);
  return {worst <= 1 && secs < 120,
          fmt("MC score covariance vs closed-form Fisher, 24 points, N=1e6: worst error/tolerance %.3f at %s; %.1f s",
              worst, where.c_str(), secs)};
}

Outcome ac2() {
  auto t0 = Clock::now();
  QuantileGrid grid = QuantileGrid::graded(10000);
  double worst = 0;
  std::string where;
  for (auto& [fam, th] : fisher_grid()) {
    ParamMat I = fam.fisher_info(th);
    double rel = (bartlett_information(fam, th, grid) - I).norm() / I.norm();
    if (rel > worst) {
      worst = rel;
      where = fmt("%s(%g, %g)", fam.name().c_str(), th(0), th(1));
    }
  }
  double secs = seconds_since(t0);
  return {worst <= 1e-3 && secs < 60,
          fmt("-E[FD Hessian] vs Fisher, G=1e4: worst relative Frobenius error %.2e at %s (tol 1e-3); %.1f s", worst,
              where.c_str(), secs)};
}

Outcome ac3() {
  auto t0 = Clock::now();
  ParamVec one(1);
  std::vector<std::pair<ErrorFamily, ParamVec>> cat = {
      {ErrorFamily::gevd(), pv(1, 0.2)},
      {ErrorFamily::gpd(), pv(1, 0.2)},
      {ErrorFamily::poisson(), (one << 2.0).finished()},
      {ErrorFamily::binomial(5), (one << 0.3).finished()},
      {ErrorFamily::gauss_loc(1), (one << 0.5).finished()},
  };
  bool ok = true;
  std::ostringstream os;
  CheckConfig cfg;
  for (auto& [fam, th] : cat) {
    auto rep = check_remainder_rate(fam, th, cfg);
    // Worst per-halving decrease factor over all directions.
    double min_ratio = INFINITY;
    for (const auto& s : rep.series) {
      for (std::size_t j = 1; j < s.points.size(); ++j) {
        min_ratio = std::min(min_ratio, s.points[j - 1].value / s.points[j].value);
      }
    }
    ok = ok && rep.verdict == Verdict::pass && min_ratio >= 1.5 &&
         static_cast<int>(rep.series.size()) == fam.k() + 1 && rep.trajectory.size() == 7;
    os << fam.name() << " " << verdict_name(rep.verdict) << " (min ratio " << fmt("%.2f", min_ratio) << "), ";
  }
  double secs = seconds_since(t0);
  return {ok && secs < 60, "remainder/|h|^2 per halving, k+1 directions: " + os.str() + fmt("%.1f s", secs)};
}

Outcome ac4() {
  const auto& c = shape_constants();
  const double a3 = std::exp(-0.5);
  double fl = shape_f(-1e-9), fr = shape_f(1e-9);
  double c1_value = std::max(std::abs(shape_f(0) - 1), std::abs(c.a1 / std::pow(std::log(c.a2), 2) + c.a3 - 1));
  double c1_slope = std::abs(2 * c.a1 / (c.a2 * std::pow(std::log(c.a2), 3)) - 1);
  double l15 = link_value(LinkKind::shape_gevd, std::log(15.0));
  double l193 = link_value(LinkKind::shape_gevd, std::log(193.0));
  bool a2_ok = std::abs(c.a2 - 1.624) <= 1e-3;
  bool a1_ok = std::abs(c.a1 - 0.00926) <= 1e-4;
  bool a3_ok = c.a3 == a3;
  bool c1_ok = c1_value <= 1e-10 && c1_slope <= 1e-10 && std::abs(fr - fl) < 1e-8;
  bool l_ok = std::abs(l15 - 2) <= 0.02 && std::abs(l193 - 3) <= 0.02;
  std::string detail =
      fmt("a2=%.6f [%s] a1=%.6f vs 0.00926 [%s] a3=e^-1/2 [%s] C1 gap %.1e/%.1e [%s] l(log 15)=%.4f "
          "l(log 193)=%.4f [%s]",
          c.a2, a2_ok ? "ok" : "off", c.a1, a1_ok ? "ok" : "off", a3_ok ? "ok" : "off", c1_value, c1_slope,
          c1_ok ? "ok" : "off", l15, l193, l_ok ? "ok" : "off");
  if (!a1_ok) detail += fmt("; a1 is fixed by the C1 equations at 0.5*a2*log(a2)^3=%.6f", 0.5 * c.a2 * std::pow(std::log(c.a2), 3));
  return {a1_ok && a2_ok && a3_ok && c1_ok && l_ok, detail};
}

Outcome ac5() {
  auto t0 = Clock::now();
  struct Pairing {
    ErrorFamily fam;
    const char* link;
  };
  const std::vector<Pairing> pairings = {
      {ErrorFamily::gevd(), "log,shape_gevd"},
      {ErrorFamily::gevd(), "log,shape_gevd_shifted"},
      {ErrorFamily::gevd(), "log,binomial_rescaled"},
      {ErrorFamily::gevd(), "shape_gevd_shifted,shape_gevd_shifted"},
      {ErrorFamily::gpd(), "log,shape_gpd"},
      {ErrorFamily::gpd(), "log,identity"},
      {ErrorFamily::gpd(), "shape_gevd_shifted,binomial_rescaled"},
      {ErrorFamily::poisson(), "log"},
      {ErrorFamily::poisson(), "shape_gevd_shifted"},
      {ErrorFamily::poisson(), "shape_gpd"},
      {ErrorFamily::binomial(1), "logit"},
      {ErrorFamily::binomial(6), "logit"},
      {ErrorFamily::gauss_loc(1), "identity"},
      {ErrorFamily::gauss_loc(0.7), "log"},
  };
  oracle::Gen g(5150);
  int done = 0, skipped = 0;
  double worst = 0;
  std::vector<int> per_pair(pairings.size(), 0);
  std::size_t next = 0;
  while (done < 200) {
    const auto& pr = pairings[next];
    LinkFunction L = LinkFunction::parse(pr.link);
    GlmSpec spec(pr.fam, L, PartitionSpec(g.partition(pr.fam.k(), 3)));
    VectorXd beta = g.vec(spec.p(), -0.5, 0.5), x = g.vec(spec.p(), -1, 1);
    ParamVec vt = L.apply(linear_predictor(spec, beta, x));
    bool usable = pr.fam.in_domain(vt);
    if (usable && pr.fam.k() == 2) usable = vt(1) > -0.45 && std::abs(vt(1)) > 0.02;
    if (!usable) {
      ++skipped;
      continue;
    }
    double y = pr.fam.quantile(vt, g.uniform(0.05, 0.95));
    VectorXd s = glm_score(spec, beta, x, y);
    VectorXd fd = oracle::fd_gradient([&](const VectorXd& b) { return glm_log_density(spec, b, x, y); }, beta, 1e-6);
    worst = std::max(worst, (s - fd).cwiseAbs().maxCoeff());
    ++per_pair[next];
    ++done;
    next = (next + 1) % pairings.size();
  }
  double secs = seconds_since(t0);
  int min_cover = *std::min_element(per_pair.begin(), per_pair.end());
  return {worst <= 1e-5 && min_cover > 0 && secs < 30,
          fmt("glm_score vs FD gradient, 200 instances over %zu family/link pairings (>=%d each, %d redrawn): max "
              "abs error %.2e (tol 1e-5); %.1f s",
              pairings.size(), min_cover, skipped, worst, secs)};
}

Outcome ac6() {
  GlmSpec spec(ErrorFamily::poisson(), LinkFunction::parse("identity"), PartitionSpec::single(1));
  CheckConfig cfg;
  auto fel = check_feller(spec, vec({1}), DesignSequence::inverse_n(), cfg);
  auto lin = check_lindeberg(spec, vec({1}), DesignSequence::inverse_n(), cfg);
  bool traj_ok = fel.trajectory.size() == 4;
  std::ostringstream ft, lt;
  for (std::size_t i = 0; i < fel.trajectory.size(); ++i) {
    traj_ok = traj_ok && std::abs(fel.trajectory[i].value - 1.0 / cfg.n_ladder[i]) <= 1e-12;
    ft << (i ? "," : "") << fmt("%.6g", fel.trajectory[i].value);
  }
  bool lin_ok = !lin.trajectory.empty();
  for (std::size_t i = 0; i < lin.trajectory.size(); ++i) {
    lin_ok = lin_ok && lin.trajectory[i].value > 0.1;
    lt << (i ? "," : "") << fmt("%.4f", lin.trajectory[i].value);
  }
  bool ok = traj_ok && lin_ok && fel.verdict == Verdict::pass && lin.verdict == Verdict::fail;
  return {ok, "Poisson identity, x=1/n: feller=" + verdict_name(fel.verdict) + " {" + ft.str() +
                  "}, lindeberg(eps=0.5)=" + verdict_name(lin.verdict) + " {" + lt.str() + "}"};
}

Outcome ac7() {
  auto t0 = Clock::now();
  CheckConfig cfg;
  cfg.draws = 1000000;
  cfg.seed = 1;
  GlmSpec binom(ErrorFamily::binomial(1), LinkFunction::parse("logit"), PartitionSpec::single(2));
  auto Kb = RegressorSampler::parse("const(1), normal(0, 1)");
  auto b2 = check_cond_ii(binom, vec({0.2, -0.5}), Kb, cfg);
  auto b3 = check_cond_iii(binom, vec({0.2, -0.5}), Kb, cfg);
  GlmSpec pois(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(1));
  auto p2 = check_cond_ii(pois, vec({1}), RegressorSampler::parse("cauchy(0, 1)"), cfg);
  auto Kg = RegressorSampler::parse("const(1), log_gevd(1, 0.5)");
  GlmSpec shape(ErrorFamily::gevd(), LinkFunction::parse("log,shape_gevd_shifted"), PartitionSpec({1, 1}));
  auto g2 = check_cond_ii(shape, vec({0, 0.5}), Kg, cfg);
  GlmSpec logl(ErrorFamily::gevd(), LinkFunction::parse("log,log"), PartitionSpec({1, 1}));
  auto l2 = check_cond_ii(logl, vec({0, 0.5}), Kg, cfg);
  double secs = seconds_since(t0);
  bool ok = b2.verdict == Verdict::pass && b3.verdict == Verdict::pass && p2.verdict == Verdict::fail &&
            g2.verdict == Verdict::pass && l2.verdict == Verdict::fail && secs < 300;
  return {ok, "N=1e6 seed 1: binomial-logit/normal ii=" + verdict_name(b2.verdict) + " iii=" +
                  verdict_name(b3.verdict) + ", poisson-log/cauchy ii=" + verdict_name(p2.verdict) +
                  ", gevd-shape-link/log-gevd ii=" + verdict_name(g2.verdict) + ", gevd-log-link/log-gevd ii=" +
                  verdict_name(l2.verdict) + fmt("; %.1f s", secs)};
}

Outcome ac8() {
  auto t0 = Clock::now();
  const int n = 5000, reps = 100;
  const VectorXd beta_star = vec({0.5, -0.3});
  GlmSpec pois(ErrorFamily::poisson(), LinkFunction::parse("log"), PartitionSpec::single(2));
  GlmSpec lin(ErrorFamily::gauss_loc(1), LinkFunction::parse("identity"), PartitionSpec::single(2));
  int covered[2] = {0, 0}, converged = 0;
  double worst_ols = 0;
  for (int r = 0; r < reps; ++r) {
    std::mt19937_64 eng(9000 + r);
    std::normal_distribution<double> N01;
    MatrixXd X(n, 2);
    VectorXd y(n), z(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = N01(eng);
      X(i, 1) = N01(eng);
      y(i) = std::poisson_distribution<int>(std::exp(X.row(i).dot(beta_star)))(eng);
      z(i) = X.row(i).dot(beta_star) + N01(eng);
    }
    FitResult fit = fisher_scoring_fit(pois, X, y, VectorXd::Zero(2));
    if (fit.converged && fit.se.size() == 2) {
      ++converged;
      for (int j = 0; j < 2; ++j) covered[j] += std::abs(fit.beta(j) - beta_star(j)) <= 3 * fit.se(j);
    }
    FitResult lf = fisher_scoring_fit(lin, X, z, VectorXd::Zero(2));
    double err = lf.converged ? (lf.beta - oracle::ols(X, z)).cwiseAbs().maxCoeff() : INFINITY;
    worst_ols = std::max(worst_ols, err);
  }
  double secs = seconds_since(t0);
  bool ok = covered[0] >= 95 && covered[1] >= 95 && worst_ols <= 1e-8 && secs < 120;
  return {ok, fmt("Poisson log n=5000, 100 reps: %d converged, 3-SE coverage %d/%d and %d/%d; gauss identity vs OLS "
                  "max diff %.1e; %.1f s",
                  converged, covered[0], reps, covered[1], reps, worst_ols, secs)};
}

Outcome ac9() {
  auto t0 = Clock::now();
  TsConfig base;
  base.family = FamilyKind::gevd;
  base.shape_link = LinkKind::shape_gevd_shifted;
  base.T = 100000;
  base.seed = 2718;
  auto csv = [](const TsConfig& c) {
    std::ostringstream os;
    write_series_csv(os, simulate(c));
    return os.str();
  };
  TsConfig pos = base, neg = base;
  pos.beta_xi = {0.3};
  neg.beta_xi = {-0.3};
  bool same = csv(pos) == csv(pos);
  TsSeries a = simulate(pos), b = simulate(neg);
  double ma = conditional_shape_mean(a, 0.9), mb = conditional_shape_mean(b, 0.9);
  ClusterSummary ca = cluster_summary(post_burn_in(a), 0.95), cb = cluster_summary(post_burn_in(b), 0.95);
  double secs = seconds_since(t0);
  bool ok = same && ma > mb && ca.mean_cluster_size > cb.mean_cluster_size && secs < 60;
  return {ok, fmt("T=1e5 seed %llu: CSV repeat %s; E[xi_t | x_{t-1} top decile] %.4f (+0.3) vs %.4f (-0.3); mean "
                  "cluster size at u=0.95 %.4f vs %.4f; %.1f s",
                  static_cast<unsigned long long>(base.seed), same ? "byte-identical" : "DIFFERS", ma, mb,
                  ca.mean_cluster_size, cb.mean_cluster_size, secs)};
}

std::set<std::string> parse_set(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only, known;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = parse_set(argv[++i]);
    } else if (a == "--known-failures" && i + 1 < argc) {
      known = parse_set(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only AC1,AC2] [--known-failures AC4]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},
  };
  std::set<std::string> failed, ran;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    ran.insert(name);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(name);
    std::printf("%s %s %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  int status = 0;
  for (const auto& f : failed) {
    if (!known.count(f)) status = 1;
  }
  for (const auto& k : known) {
    if (ran.count(k) && !failed.count(k)) {
      std::printf("note: %s was declared a known failure but passed\n", k.c_str());
      status = 1;
    }
  }
  std::printf("summary: %zu/%zu PASS", ran.size() - failed.size(), ran.size());
  if (!failed.empty()) {
    std::printf("; FAIL:");
    for (const auto& f : failed) std::printf(" %s%s", f.c_str(), known.count(f) ? " (known)" : "");
  }
  std::printf("\n");
  return status;
}
