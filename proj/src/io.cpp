#include "netcoh/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "netcoh/errors.hpp"

namespace netcoh {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, bool commas_only) {
  std::vector<std::string> out;
  if (commas_only) {
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == '\t' || c == ' ' || c == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidInput(where + ": not a number: '" + s + "'");
  return v;
}

long parse_id(const std::string& s, const std::string& where) {
  long v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0)
    throw InvalidInput(where + ": node id must be a non-negative integer, got '" + s + "'");
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return in;
}

Eigen::VectorXd json_vector(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) throw InvalidInput(std::string("model JSON: missing array '") + key + "'");
  const auto v = doc[key].get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<Edge> read_edge_rows(std::istream& in) {
  std::vector<Edge> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto f = split_fields(t, false);
    const std::string where = "edge list line " + std::to_string(lineno);
    if (f.size() < 2 || f.size() > 3) throw InvalidInput(where + ": expected 'u v [w]'");
    const long u = parse_id(f[0], where), v = parse_id(f[1], where);
    if (u > INT32_MAX || v > INT32_MAX) throw InvalidInput(where + ": node id out of range");
    Edge e{static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0};
    if (f.size() == 3) e.w = parse_double(f[2], where);
    rows.push_back(e);
  }
  return rows;
}

Graph read_graph(const std::filesystem::path& path, int n) {
  std::ifstream in = open_input(path);
  const std::vector<Edge> rows = read_edge_rows(in);
  if (n < 0) {
    n = 0;
    for (const Edge& e : rows) n = std::max({n, e.u + 1, e.v + 1});
  }
  return from_edge_list(rows, n);
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << std::setprecision(17);
  for (const Edge& e : g.edges()) os << e.u << '\t' << e.v << '\t' << e.w << '\n';
}

Eigen::Index Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidInput("CSV has no column '" + name + "'");
  return it - columns.begin();
}

bool Table::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

Table Table::without(const std::vector<std::string>& exclude) const {
  Table out;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (std::find(exclude.begin(), exclude.end(), columns[j]) == exclude.end()) {
      keep.push_back(static_cast<Eigen::Index>(j));
      out.columns.push_back(columns[j]);
    }
  out.values.resize(values.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.values.col(j) = values.col(keep[j]);
  return out;
}

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InvalidInput("CSV: missing header");
  t.columns = split_fields(trim(line), true);
  for (const auto& c : t.columns)
    if (c.empty()) throw InvalidInput("CSV: empty column name in header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    const auto f = split_fields(s, true);
    const std::string where = "CSV line " + std::to_string(lineno);
    if (f.size() != t.columns.size())
      throw InvalidInput(where + ": expected " + std::to_string(t.columns.size()) + " fields, got " +
                         std::to_string(f.size()));
    std::vector<double> row;
    for (const auto& x : f) row.push_back(parse_double(x, where));
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(i, j) = rows[i][j];
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_csv(in);
}

void write_csv(std::ostream& os, const Table& t) {
  os << std::setprecision(17);
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
  os << '\n';
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) os << (j ? "," : "") << t.values(i, j);
    os << '\n';
  }
}

SurvivalData survival_from(const Table& t, const std::string& time, const std::string& event) {
  SurvivalData s;
  s.time = t.values.col(t.column(time));
  const Eigen::VectorXd ev = t.values.col(t.column(event));
  s.event.resize(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] != 0.0 && ev[i] != 1.0) throw InvalidInput("event column must hold 0 or 1");
    s.event[i] = static_cast<int>(ev[i]);
  }
  return s;
}

nlohmann::json model_to_json(const FitCore& fit, const std::vector<std::string>& covariates) {
  if (static_cast<Eigen::Index>(covariates.size()) != fit.beta_hat.size())
    throw InvalidInput("model_to_json: one covariate name per coefficient required");
  nlohmann::json doc;
  doc["family"] = std::string(to_string(fit.family));
  doc["lambda"] = fit.lambda;
  doc["gamma"] = fit.gamma;
  doc["n"] = fit.alpha_hat.size();
  doc["covariates"] = covariates;
  doc["alpha"] = to_std(fit.alpha_hat);
  doc["beta"] = to_std(fit.beta_hat);
  doc["beta_original_scale"] = to_std(fit.beta_hat.cwiseQuotient(fit.standardization.scale));
  doc["center"] = to_std(fit.standardization.center);
  doc["scale"] = to_std(fit.standardization.scale);
  return doc;
}

FitCore model_from_json(const nlohmann::json& doc, std::vector<std::string>* covariates) {
  FitCore fit;
  try {
    fit.family = parse_family(doc.at("family").get<std::string>());
    fit.lambda = doc.at("lambda").get<double>();
    fit.gamma = doc.at("gamma").get<double>();
    if (covariates) *covariates = doc.at("covariates").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("model JSON: ") + e.what());
  }
  fit.alpha_hat = json_vector(doc, "alpha");
  fit.beta_hat = json_vector(doc, "beta");
  fit.standardization.center = json_vector(doc, "center");
  fit.standardization.scale = json_vector(doc, "scale");
  const Eigen::Index p = fit.beta_hat.size();
  if (fit.standardization.center.size() != p || fit.standardization.scale.size() != p)
    throw InvalidInput("model JSON: center/scale length differs from beta");
  if (covariates && static_cast<Eigen::Index>(covariates->size()) != p)
    throw InvalidInput("model JSON: covariate names differ in length from beta");
  return fit;
}

nlohmann::json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations}, {"final_residual", r.final_residual}, {"converged", r.converged}};
}

}  // namespace netcoh
