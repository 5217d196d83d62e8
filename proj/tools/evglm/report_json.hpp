#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "evglm/diagnostics.hpp"
#include "evglm/estimation.hpp"
#include "evglm/ts_sim.hpp"

namespace evglm::cli {

using Json = nlohmann::ordered_json;

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);
Json to_json(const CheckConfig& cfg);
Json to_json(const ConditionReport& rep, const CheckConfig& cfg);
Json to_json(const FitResult& fit);
Json to_json(const ClusterSummary& c);

/// Data file with a mandatory header naming `y` and `x1..xp`.
struct DataTable {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};
DataTable read_data_csv(const std::string& path, int p);

}  // namespace evglm::cli
