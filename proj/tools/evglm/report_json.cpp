#include "report_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "evglm/errors.hpp"

namespace evglm::cli {

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Json trajectory_json(const std::vector<TrajectoryPoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(Json{{"control", number(p.control)}, {"value", number(p.value)}});
  return a;
}

}  // namespace

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    a.push_back(row);
  }
  return a;
}

Json to_json(const CheckConfig& cfg) {
  return Json{{"draws", cfg.draws},
              {"b", cfg.b},
              {"t_grid", cfg.t_grid},
              {"epsilon", cfg.epsilon},
              {"epsilon_sweep", cfg.epsilon_sweep},
              {"h_ladder", cfg.h_ladder},
              {"s_ladder", cfg.s_ladder},
              {"n_ladder", cfg.n_ladder},
              {"tol_stab", cfg.tol_stab},
              {"tol_cont", cfg.tol_cont},
              {"min_ratio", cfg.min_ratio},
              {"quad_nodes", cfg.quad_nodes}};
}

Json to_json(const ConditionReport& rep, const CheckConfig& cfg) {
  Json j;
  j["condition"] = rep.condition;
  j["verdict"] = verdict_name(rep.verdict);
  j["control"] = rep.control_name;
  j["trajectory"] = trajectory_json(rep.trajectory);
  Json series = Json::array();
  for (const auto& s : rep.series) series.push_back(Json{{"name", s.name}, {"trajectory", trajectory_json(s.points)}});
  j["series"] = series;
  j["tolerance"] = number(rep.tolerance);
  j["diagnostics"] = rep.diagnostics;
  Json w = Json::array();
  for (double x : rep.witness) w.push_back(number(x));
  j["witness"] = w;
  j["config"] = to_json(cfg);
  j["seed"] = cfg.seed;
  return j;
}

Json to_json(const FitResult& fit) {
  Json j;
  j["beta"] = to_json(fit.beta);
  j["se"] = fit.se.size() ? to_json(fit.se) : Json(nullptr);
  j["loglik"] = number(fit.loglik);
  j["score_norm"] = number(fit.score_norm);
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["message"] = fit.message;
  Json trace = Json::array();
  for (const auto& it : fit.trace) {
    trace.push_back(Json{{"iteration", it.iteration},
                         {"beta", to_json(it.beta)},
                         {"loglik", number(it.loglik)},
                         {"score_norm", number(it.score_norm)},
                         {"step_norm", number(it.step_norm)},
                         {"halvings", it.halvings}});
  }
  j["trace"] = trace;
  return j;
}

Json to_json(const ClusterSummary& c) {
  return Json{{"u", c.u},
              {"threshold", number(c.threshold)},
              {"exceedances", c.exceedances},
              {"clusters", c.clusters},
              {"mean_cluster_size", number(c.mean_cluster_size)}};
}

DataTable read_data_csv(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open data file '" + path + "'", 0);
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw ParseError("data file is empty; header y,x1..xp required", 1);
  auto header = split_csv_line(line);
  int ycol = -1;
  std::vector<int> xcol(p, -1);
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[c];
    if (h == "y") {
      ycol = c;
    } else if (h.size() > 1 && h[0] == 'x') {
      int j = 0;
      try {
        j = std::stoi(h.substr(1));
      } catch (const std::exception&) {
        throw ParseError("unknown column '" + h + "'", 1);
      }
      if (j < 1 || j > p) throw ParseError("column '" + h + "' outside x1..x" + std::to_string(p), 1);
      xcol[j - 1] = c;
    } else {
      throw ParseError("unknown column '" + h + "'", 1);
    }
  }
  if (ycol < 0) throw ParseError("header has no 'y' column", 1);
  for (int j = 0; j < p; ++j) {
    if (xcol[j] < 0) throw ParseError("header has no 'x" + std::to_string(j + 1) + "' column", 1);
  }
  std::vector<double> vals;
  int lineno = 1, n = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()),
                       lineno);
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t used = 0;
      try {
        row[c] = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size()) throw ParseError("not a number: '" + cells[c] + "'", lineno);
    }
    vals.push_back(row[ycol]);
    for (int j = 0; j < p; ++j) vals.push_back(row[xcol[j]]);
    ++n;
  }
  if (n == 0) throw ParseError("data file has a header but no rows", lineno);
  DataTable t{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    t.y(i) = vals[i * (p + 1)];
    for (int j = 0; j < p; ++j) t.X(i, j) = vals[i * (p + 1) + 1 + j];
  }
  return t;
}

}  // namespace evglm::cli
