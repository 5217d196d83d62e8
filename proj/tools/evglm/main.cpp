// evglm: command-line front end for Fisher queries, link tables, condition
// checks, time-series simulation and fitting.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "evglm/designs.hpp"
#include "evglm/diagnostics.hpp"
#include "evglm/error_models.hpp"
#include "evglm/errors.hpp"
#include "evglm/estimation.hpp"
#include "evglm/glm.hpp"
#include "evglm/links.hpp"
#include "evglm/model_spec.hpp"
#include "evglm/ts_sim.hpp"
#include "evglm_schemas.hpp"
#include "report_json.hpp"

using namespace evglm;
using cli::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

// Usage problems found after CLI11 parsing.
struct UsageError : Error {
  using Error::Error;
};

int report_error(const std::string& kind, const std::string& message, int code) {
  Json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return code;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// ---- info -------------------------------------------------------------

struct InfoArgs {
  std::string family;
  std::optional<double> sigma, xi, lambda, p, location;
  int m = 1;
  double sd = 1.0;
};

int cmd_info(const InfoArgs& a) {
  ErrorFamily fam = ErrorFamily::from_name(a.family, a.m, a.sd);
  auto need = [&](const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string("family ") + a.family + " needs " + flag);
    return *v;
  };
  ParamVec theta;
  switch (fam.kind()) {
    case FamilyKind::gevd:
    case FamilyKind::gpd: {
      double sigma = need(a.sigma, "--sigma"), xi = need(a.xi, "--xi");
      if (fam.kind() == FamilyKind::gevd && std::abs(xi) < kShapeGuard) {
        throw SingularityError("gevd Fisher information is singular at xi = 0 (guard band " +
                                   std::to_string(kShapeGuard) + ")",
                               0.0);
      }
      theta = fam.make_theta({sigma, xi});
      break;
    }
    case FamilyKind::poisson:
      theta = fam.make_theta({need(a.lambda, "--lambda")});
      break;
    case FamilyKind::binomial:
      theta = fam.make_theta({need(a.p, "--p")});
      break;
    case FamilyKind::gauss_loc:
      theta = fam.make_theta({need(a.location, "--location")});
      break;
  }
  ParamMat I = fam.fisher_info(theta);
  Json th;
  auto names = fam.param_names();
  for (std::size_t i = 0; i < names.size(); ++i) th[names[i]] = theta(static_cast<Eigen::Index>(i));
  Json j;
  j["family"] = fam.name();
  if (fam.kind() == FamilyKind::binomial) j["m"] = fam.trials();
  if (fam.kind() == FamilyKind::gauss_loc) j["sd"] = fam.noise_sd();
  j["theta"] = th;
  j["fisher"] = cli::to_json(Eigen::MatrixXd(I));
  emit(j);
  return kExitOk;
}

// ---- link-table -------------------------------------------------------

struct LinkTableArgs {
  std::string link;
  double from = -5, to = 5, step = 1;
  std::string out;
};

int cmd_link_table(const LinkTableArgs& a) {
  LinkKind kind = link_kind_from_name(a.link);
  if (!(a.step > 0) || !(a.to >= a.from)) throw UsageError("link-table needs --to >= --from and --step > 0");
  auto n = static_cast<long>(std::floor((a.to - a.from) / a.step + 1e-9)) + 1;
  if (n > 10000000) throw UsageError("link-table grid is too large");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = a.from + static_cast<double>(i) * a.step;
  auto rows = link_table(kind, grid);
  if (a.out.empty() || a.out == "-") {
    write_link_table_csv(std::cout, rows);
  } else {
    std::ofstream os(a.out);
    if (!os) throw UsageError("cannot write '" + a.out + "'");
    write_link_table_csv(os, rows);
  }
  return kExitOk;
}

// ---- check ------------------------------------------------------------

struct CheckArgs {
  std::string spec;
  std::vector<std::string> conditions;
  std::optional<std::string> link, partition;
  std::optional<std::uint64_t> seed;
  std::optional<double> b, epsilon;
  std::optional<std::size_t> draws;
  std::optional<int> t_grid;
};

ModelSpec load_spec(const std::string& path, const std::optional<std::string>& link,
                    const std::optional<std::string>& partition) {
  ModelSpec s = ModelSpec::load(path);
  if (link || partition) {
    if (link) s.link = *link;
    if (partition) {
      s.partition.clear();
      for (double d : parse_number_list(*partition)) {
        if (d != std::floor(d)) throw UsageError("--partition takes integer block sizes");
        s.partition.push_back(static_cast<int>(d));
      }
    }
    s = ModelSpec::parse(s.to_text());  // re-validate
  }
  return s;
}

ParamVec remainder_point(const ModelSpec& s, const GlmSpec& glm, const Eigen::VectorXd& beta,
                         std::uint64_t seed) {
  if (!s.theta.empty()) {
    ParamVec th(static_cast<Eigen::Index>(s.theta.size()));
    for (std::size_t i = 0; i < s.theta.size(); ++i) th(static_cast<Eigen::Index>(i)) = s.theta[i];
    glm.family().check_domain(th);
    return th;
  }
  Eigen::VectorXd x = s.stochastic() ? Eigen::VectorXd(s.sampler().draw_columns(1, seed).col(0))
                                     : Eigen::VectorXd(s.design_sequence().rows(1).row(0).transpose());
  return parameter_from_predictor(glm, linear_predictor(glm, beta, x));
}

int cmd_check(const CheckArgs& a) {
  ModelSpec s = load_spec(a.spec, a.link, a.partition);
  GlmSpec glm = s.glm();
  Eigen::VectorXd beta = s.beta_vector();
  CheckConfig cfg;
  if (a.seed) cfg.seed = *a.seed;
  if (a.b) cfg.b = *a.b;
  if (a.epsilon) cfg.epsilon = *a.epsilon;
  if (a.draws) cfg.draws = *a.draws;
  if (a.t_grid) cfg.t_grid = *a.t_grid;
  if (!(cfg.b > 0) || cfg.t_grid < 1 || !(cfg.epsilon > 0)) throw UsageError("--b, --epsilon and --t-grid must be positive");
  cfg.validate();

  std::vector<std::string> conds = a.conditions;
  if (conds.empty()) {
    conds = s.stochastic() ? std::vector<std::string>{"cond_ii", "cond_iii"}
                           : std::vector<std::string>{"feller", "lindeberg", "info_cont_det"};
  }
  const bool stochastic = s.stochastic();
  Json out = Json::array();
  bool all_pass = true;
  for (const auto& c : conds) {
    ConditionReport rep;
    if (c == "remainder") {
      rep = check_remainder_rate(glm.family(), remainder_point(s, glm, beta, cfg.seed), cfg);
    } else if (c == "cond_ii" || c == "cond_iii") {
      if (!stochastic) throw UsageError(c + " needs a stochastic carrier");
      rep = c == "cond_ii" ? check_cond_ii(glm, beta, s.sampler(), cfg) : check_cond_iii(glm, beta, s.sampler(), cfg);
    } else if (c == "feller" || c == "lindeberg" || c == "info_cont_det") {
      if (stochastic) throw UsageError(c + " needs a deterministic carrier");
      DesignSequence d = s.design_sequence();
      rep = c == "feller" ? check_feller(glm, beta, d, cfg)
            : c == "lindeberg" ? check_lindeberg(glm, beta, d, cfg)
                               : check_info_cont_det(glm, beta, d, cfg);
    } else {
      throw UsageError("unknown condition '" + c +
                       "' (remainder, cond_ii, cond_iii, feller, lindeberg, info_cont_det)");
    }
    all_pass = all_pass && rep.verdict == Verdict::pass;
    out.push_back(cli::to_json(rep, cfg));
  }
  emit(out);
  return all_pass ? kExitOk : kExitFailed;
}

// ---- simulate ---------------------------------------------------------

struct SimulateArgs {
  std::string family = "gevd";
  int T = 1000;
  std::uint64_t seed = 1;
  std::string beta_sigma = "0", beta_xi = "0";
  std::string scale_link = "log", shape_link = "shape_gevd_shifted";
  double x_min = 1e-6;
  std::string start;
  int burn_in = -1;
  double threshold_u = 0.95;
  bool positive_shape_only = false;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  TsConfig cfg;
  if (a.family == "gevd") {
    cfg.family = FamilyKind::gevd;
  } else if (a.family == "gpd") {
    cfg.family = FamilyKind::gpd;
  } else {
    throw UsageError("simulate supports --family gevd or gpd");
  }
  cfg.T = a.T;
  cfg.seed = a.seed;
  cfg.beta_sigma = parse_number_list(a.beta_sigma);
  cfg.beta_xi = parse_number_list(a.beta_xi);
  cfg.scale_link = link_kind_from_name(a.scale_link);
  cfg.shape_link = link_kind_from_name(a.shape_link);
  cfg.x_min = a.x_min;
  if (!a.start.empty()) cfg.start = parse_number_list(a.start);
  cfg.burn_in = a.burn_in;
  cfg.positive_shape_only = a.positive_shape_only;
  if (!(a.threshold_u > 0 && a.threshold_u < 1)) throw UsageError("--threshold-u must lie in (0, 1)");
  cfg.validate();

  TsSeries s = simulate(cfg);
  if (!a.out.empty()) {
    std::ofstream os(a.out, std::ios::binary);
    if (!os) throw UsageError("cannot write '" + a.out + "'");
    write_series_csv(os, s);
  }
  auto post = post_burn_in(s);
  double xi_mean = 0, sigma_mean = 0;
  for (std::size_t t = static_cast<std::size_t>(s.burn_in); t < s.x.size(); ++t) {
    xi_mean += s.xi[t];
    sigma_mean += s.sigma[t];
  }
  const double n = static_cast<double>(post.size());
  Json j;
  j["family"] = a.family;
  j["T"] = cfg.T;
  j["seed"] = cfg.seed;
  j["burn_in"] = s.burn_in;
  j["clipped_steps"] = s.clipped_steps;
  j["clip_rate"] = s.clip_rate();
  j["sigma_mean"] = n > 0 ? sigma_mean / n : 0.0;
  j["xi_mean"] = n > 0 ? xi_mean / n : 0.0;
  j["conditional_xi_mean"] = Json{{"u", 0.9}, {"value", conditional_shape_mean(s, 0.9)}};
  j["cluster"] = cli::to_json(cluster_summary(post, a.threshold_u));
  j["out"] = a.out.empty() ? Json(nullptr) : Json(a.out);
  emit(j);
  return kExitOk;
}

// ---- fit --------------------------------------------------------------

struct FitArgs {
  std::string spec, data, start;
  std::optional<std::string> link, partition;
  int max_iter = 200;
  double tol = 1e-8;
};

int cmd_fit(const FitArgs& a) {
  ModelSpec s = load_spec(a.spec, a.link, a.partition);
  GlmSpec glm = s.glm();
  auto table = cli::read_data_csv(a.data, glm.p());
  Eigen::VectorXd start;
  if (a.start.empty()) {
    start = default_start(glm, table.X, table.y);
  } else {
    auto v = parse_number_list(a.start);
    if (static_cast<int>(v.size()) != glm.p()) throw UsageError("--start needs " + std::to_string(glm.p()) + " values");
    start = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  FitConfig cfg;
  cfg.max_iter = a.max_iter;
  cfg.tol_score = a.tol;
  if (cfg.max_iter < 1 || !(cfg.tol_score > 0)) throw UsageError("--max-iter and --tol must be positive");
  FitResult fit = fisher_scoring_fit(glm, table.X, table.y, start, cfg);
  emit(cli::to_json(fit));
  return fit.converged ? kExitOk : kExitFailed;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return "usage";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const SingularityError*>(&e)) return "singularity";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  return "error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme-value GLM toolkit: Fisher information, links, regularity checks, simulation, fitting"};
  app.require_subcommand(0, 1);
  std::string schema_name;
  app.add_option("--json-schema", schema_name, "Print the JSON schema of a command's output (" +
                                                   std::string(schemas::names()) + ") and exit");

  InfoArgs info;
  auto* sc_info = app.add_subcommand("info", "Fisher information of an error model");
  sc_info->add_option("--family", info.family, "gevd, gpd, poisson, binomial, gauss_loc")->required();
  sc_info->add_option("--sigma", info.sigma, "scale (gevd, gpd)");
  sc_info->add_option("--xi", info.xi, "shape (gevd, gpd)");
  sc_info->add_option("--lambda", info.lambda, "rate (poisson)");
  sc_info->add_option("--p", info.p, "success probability (binomial)");
  sc_info->add_option("--m", info.m, "trial count (binomial)");
  sc_info->add_option("--sd", info.sd, "noise sd (gauss_loc)");
  sc_info->add_option("--location", info.location, "location (gauss_loc)");

  LinkTableArgs lt;
  auto* sc_lt = app.add_subcommand("link-table", "Tabulate a link and its derivative as CSV");
  sc_lt->add_option("--link", lt.link, "link name")->required();
  sc_lt->add_option("--from", lt.from, "first grid point")->capture_default_str();
  sc_lt->add_option("--to", lt.to, "last grid point")->capture_default_str();
  sc_lt->add_option("--step", lt.step, "grid step")->capture_default_str();
  sc_lt->add_option("--out", lt.out, "output CSV (default stdout)");

  CheckArgs ck;
  auto* sc_ck = app.add_subcommand("check", "Run regularity checks on a model spec");
  sc_ck->add_option("--spec", ck.spec, "model spec file")->required();
  sc_ck->add_option("--conditions", ck.conditions, "comma list of conditions")->delimiter(',');
  sc_ck->add_option("--link", ck.link, "override the spec's link list");
  sc_ck->add_option("--partition", ck.partition, "override the spec's partition");
  sc_ck->add_option("--seed", ck.seed, "Monte Carlo seed");
  sc_ck->add_option("--b", ck.b, "radius of the t-sphere");
  sc_ck->add_option("--epsilon", ck.epsilon, "Lindeberg epsilon");
  sc_ck->add_option("--draws", ck.draws, "Monte Carlo draws");
  sc_ck->add_option("--t-grid", ck.t_grid, "number of t directions");

  SimulateArgs sim;
  auto* sc_sim = app.add_subcommand("simulate", "Simulate the extreme-value AR-type time series");
  sc_sim->add_option("--family", sim.family, "gevd or gpd")->capture_default_str();
  sc_sim->add_option("--T", sim.T, "series length")->capture_default_str();
  sc_sim->add_option("--seed", sim.seed, "seed")->capture_default_str();
  sc_sim->add_option("--beta-sigma", sim.beta_sigma, "scale coefficients, one per lag")->capture_default_str();
  sc_sim->add_option("--beta-xi", sim.beta_xi, "shape coefficients, one per lag")->capture_default_str();
  sc_sim->add_option("--scale-link", sim.scale_link, "scale link")->capture_default_str();
  sc_sim->add_option("--shape-link", sim.shape_link, "shape link")->capture_default_str();
  sc_sim->add_option("--x-min", sim.x_min, "clip for past values before the log")->capture_default_str();
  sc_sim->add_option("--start", sim.start, "starting values x_{-1}, x_{-2}, ...");
  sc_sim->add_option("--burn-in", sim.burn_in, "burn-in steps (-1: 10 x lag order)")->capture_default_str();
  sc_sim->add_option("--threshold-u", sim.threshold_u, "quantile level for the cluster summary")->capture_default_str();
  sc_sim->add_flag("--positive-shape-only", sim.positive_shape_only, "reject steps with xi <= 0");
  sc_sim->add_option("--out", sim.out, "output CSV");

  FitArgs fit;
  auto* sc_fit = app.add_subcommand("fit", "Fisher-scoring fit of a model spec to data");
  sc_fit->add_option("--spec", fit.spec, "model spec file")->required();
  sc_fit->add_option("--data", fit.data, "CSV with header y,x1..xp")->required();
  sc_fit->add_option("--link", fit.link, "override the spec's link list");
  sc_fit->add_option("--partition", fit.partition, "override the spec's partition");
  sc_fit->add_option("--start", fit.start, "starting beta (comma list)");
  sc_fit->add_option("--max-iter", fit.max_iter, "iteration cap")->capture_default_str();
  sc_fit->add_option("--tol", fit.tol, "score-norm tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitUsage);
  }

  try {
    if (!schema_name.empty()) {
      const char* text = schemas::find(schema_name);
      if (!text) throw UsageError("unknown schema '" + schema_name + "' (" + schemas::names() + ")");
      std::cout << text;
      return kExitOk;
    }
    if (sc_info->parsed()) return cmd_info(info);
    if (sc_lt->parsed()) return cmd_link_table(lt);
    if (sc_ck->parsed()) return cmd_check(ck);
    if (sc_sim->parsed()) return cmd_simulate(sim);
    if (sc_fit->parsed()) return cmd_fit(fit);
    std::cout << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    return report_error(error_kind(e), e.what(), kExitUsage);
  }
}
