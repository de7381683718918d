#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "netcoh/graph.hpp"
#include "netcoh/model.hpp"
#include "netcoh/rnc_glm.hpp"
#include "netcoh/rnc_linear.hpp"

namespace netcoh {

/// Edge rows "u v [w]" separated by tabs, commas or spaces; '#' starts a
/// comment line; blank lines are skipped. Node ids are non-negative integers,
/// the weight defaults to 1. Throws InvalidInput naming the offending line.
std::vector<Edge> read_edge_rows(std::istream& in);

/// Graph on n nodes (n < 0: one more than the largest id).
Graph read_graph(const std::filesystem::path& path, int n = -1);

/// Tab-separated "u v w" rows with 17 significant digits.
void write_edge_list(std::ostream& os, const Graph& g);

/// Numeric CSV with a header row.
struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  /// Throws InvalidInput if absent.
  Eigen::Index column(const std::string& name) const;
  bool has(const std::string& name) const;
  /// All columns except `exclude`, in file order.
  Table without(const std::vector<std::string>& exclude) const;
};

Table read_csv(std::istream& in);
Table read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& os, const Table& t);

/// Survival outcome from "time" and "event" columns.
SurvivalData survival_from(const Table& t, const std::string& time = "time",
                           const std::string& event = "event");

/// Model document: family, lambda, gamma, covariate names, effects,
/// coefficients (standardized and original scale), standardization.
nlohmann::json model_to_json(const FitCore& fit, const std::vector<std::string>& covariates);
/// Inverse of model_to_json. Throws InvalidInput on a malformed document.
FitCore model_from_json(const nlohmann::json& doc, std::vector<std::string>* covariates = nullptr);

nlohmann::json to_json(const SolveReport& r);

}  // namespace netcoh
