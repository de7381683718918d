#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "manifest.hpp"
#include "netcoh/errors.hpp"
#include "netcoh/io.hpp"
#include "netcoh/model_selection.hpp"
#include "netcoh/parallel.hpp"
#include "netcoh/rnc_glm.hpp"
#include "netcoh/rnc_linear.hpp"
#include "netcoh/simulate.hpp"
#include "netcoh/sparsify.hpp"
#include "netcoh/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netcoh;
using netcoh::cli::RunManifest;

namespace {

constexpr int kExitModel = 2;
constexpr int kExitUsage = 64;

struct Options {
  // shared
  std::string out = ".";
  int threads = 0;
  std::uint64_t seed = 1;
  // data
  std::string family = "linear";
  std::string edges, data, model;
  std::string response = "y", time_col = "time", event_col = "event";
  std::vector<std::string> exclude;
  double lambda = 0.0;
  double gamma = -1.0;
  double gamma_pred = -1.0;
  // cv
  int k = 10;
  std::vector<double> grid;
  // simulate
  std::string figure;
  double scale = 1.0;
  int replications = 50;
  std::vector<double> s_grid = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> eps_grid = {0.05, 0.1, 0.15, 0.2, 0.3};
  double sigma = 0.5;
  int p = 2;
  double oversampling = 9.0;
  double experiment_oversampling = 1.0;
  // sparsify
  double epsilon = 0.1;
  int nodes = -1;
  bool no_verify = false;
  // theory
  std::string example1;
  std::string alpha_col = "alpha";
};

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::ofstream open_output(const fs::path& path, RunManifest& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  m.add_output(path);
  return os;
}

void write_json(const fs::path& path, const json& doc, RunManifest& m) {
  std::ofstream os = open_output(path, m);
  os << doc.dump(2) << '\n';
}

struct Dataset {
  Eigen::MatrixXd X;
  std::vector<std::string> covariates;
  Response y;
};

Dataset load_dataset(const Options& o, Family family, RunManifest& m) {
  m.add_input(o.data);
  const Table t = read_csv(fs::path(o.data));
  Dataset d;
  std::vector<std::string> drop = o.exclude;
  if (family == Family::cox) {
    d.y = survival_from(t, o.time_col, o.event_col);
    drop.push_back(o.time_col);
    drop.push_back(o.event_col);
  } else {
    d.y = Eigen::VectorXd(t.values.col(t.column(o.response)));
    drop.push_back(o.response);
  }
  const Table x = t.without(drop);
  if (x.columns.empty()) throw InvalidInput("data file has no covariate columns");
  d.X = x.values;
  d.covariates = x.columns;
  return d;
}

Graph load_graph(const std::string& path, int n, RunManifest& m) {
  m.add_input(path);
  return read_graph(path, n);
}

double gamma_for(const Options& o, Family f) { return o.gamma >= 0.0 ? o.gamma : default_gamma(f); }

// --- fit ----------------------------------------------------------------------

int cmd_fit(const Options& o, RunManifest& m) {
  const Family family = parse_family(o.family);
  const Dataset d = load_dataset(o, family, m);
  const Graph g = load_graph(o.edges, static_cast<int>(d.X.rows()), m);
  const double gamma = gamma_for(o, family);
  const LaplacianMatrix L = laplacian(g, gamma);

  json doc;
  Eigen::VectorXd eta, fitted;
  FitCore core;
  if (family == Family::linear) {
    const auto& Y = std::get<Eigen::VectorXd>(d.y);
    const LinearFit fit = fit_linear(d.X, Y, g, o.lambda, gamma);
    core = fit;
    fitted = fitted_values(fit, d.X);
    eta = fitted;
    doc = model_to_json(fit, d.covariates);
    const double penalty = cohesion_penalty(L, fit.alpha_hat);
    doc["penalty"] = penalty;
    doc["objective"] = (Y - fitted).squaredNorm() + o.lambda * penalty;
    doc["solver"] = to_json(fit.report);
  } else {
    const GlmFit fit = family == Family::logistic
                           ? fit_logistic(d.X, std::get<Eigen::VectorXd>(d.y), g, o.lambda, gamma)
                           : fit_cox(d.X, std::get<SurvivalData>(d.y), g, o.lambda, gamma);
    core = fit;
    eta = fit.linear_predictor(d.X);
    fitted = family == Family::logistic ? logistic(eta) : Eigen::VectorXd(eta.array().exp());
    doc = model_to_json(fit, d.covariates);
    doc["penalty"] = cohesion_penalty(L, fit.alpha_hat);
    doc["objective"] = fit.objective;
    doc["solver"] = {{"iterations", fit.iterations},
                     {"converged", fit.converged},
                     {"gradient_norm", fit.gradient_norm}};
  }
  write_json(fs::path(o.out) / "model.json", doc, m);

  Table t;
  t.columns = {"node", "alpha", "linear_predictor", "fitted"};
  t.values.resize(eta.size(), 4);
  for (Eigen::Index i = 0; i < eta.size(); ++i) t.values.row(i) << double(i), core.alpha_hat[i], eta[i], fitted[i];
  std::ofstream os = open_output(fs::path(o.out) / "fitted.csv", m);
  write_csv(os, t);
  return 0;
}

// --- predict ------------------------------------------------------------------

int cmd_predict(const Options& o, RunManifest& m) {
  m.add_input(o.model);
  std::ifstream min(o.model);
  if (!min) throw InvalidInput("cannot open " + o.model);
  json mdoc;
  try {
    mdoc = json::parse(min);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("model JSON: ") + e.what());
  }
  std::vector<std::string> covariates;
  const FitCore fit = model_from_json(mdoc, &covariates);
  const int n_train = static_cast<int>(fit.alpha_hat.size());

  m.add_input(o.data);
  const Table t = read_csv(fs::path(o.data));
  const Eigen::Index rows = t.rows();
  Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(covariates.size()));
  for (std::size_t j = 0; j < covariates.size(); ++j) X.col(j) = t.values.col(t.column(covariates[j]));

  std::vector<int> ids(rows);
  if (t.has("node")) {
    const Eigen::VectorXd col = t.values.col(t.column("node"));
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (col[i] < 0 || col[i] != std::floor(col[i])) throw InvalidInput("node ids must be non-negative integers");
      ids[i] = static_cast<int>(col[i]);
    }
  } else if (!o.edges.empty()) {
    throw InvalidInput("predicting new nodes needs a 'node' column with their ids in the enlarged network");
  } else {
    for (Eigen::Index i = 0; i < rows; ++i) ids[i] = static_cast<int>(i);
  }
  if (std::set<int>(ids.begin(), ids.end()).size() != ids.size()) throw InvalidInput("duplicate node ids");

  Eigen::VectorXd alpha(rows);
  if (o.edges.empty()) {
    // In-sample: the rows are training nodes.
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (ids[i] >= n_train) throw InvalidInput("node " + std::to_string(ids[i]) + " is not a training node");
      alpha[i] = fit.alpha_hat[ids[i]];
    }
  } else {
    int N = n_train;
    for (int id : ids) N = std::max(N, id + 1);
    const Graph g = load_graph(o.edges, N, m);
    N = g.node_count();
    for (int id : ids)
      if (id < n_train)
        throw InvalidInput("node " + std::to_string(id) + " collides with a training node id (0.." +
                           std::to_string(n_train - 1) + ")");
    std::vector<NodeId> test_ids;
    for (int v = n_train; v < N; ++v) test_ids.push_back(v);
    const LaplacianBlocks blocks = split_for_prediction(g, test_ids);
    const double gp = o.gamma_pred >= 0.0 ? o.gamma_pred : fit.gamma;
    const Eigen::VectorXd alpha_new = predict_new_nodes(fit.alpha_hat, blocks, gp);
    for (Eigen::Index i = 0; i < rows; ++i) alpha[i] = alpha_new[ids[i] - n_train];
  }

  const Eigen::VectorXd eta = fit.linear_predictor(X, alpha);
  Eigen::VectorXd pred = eta;
  if (fit.family == Family::logistic) pred = logistic(eta);
  if (fit.family == Family::cox) pred = eta.array().exp();

  Table out;
  out.columns = {"node", "alpha", "linear_predictor", "prediction"};
  out.values.resize(rows, 4);
  for (Eigen::Index i = 0; i < rows; ++i) out.values.row(i) << double(ids[i]), alpha[i], eta[i], pred[i];
  std::ofstream os = open_output(fs::path(o.out) / "predictions.csv", m);
  write_csv(os, out);
  return 0;
}

// --- cv -----------------------------------------------------------------------

int cmd_cv(const Options& o, RunManifest& m) {
  const Family family = parse_family(o.family);
  const Dataset d = load_dataset(o, family, m);
  const Graph g = load_graph(o.edges, static_cast<int>(d.X.rows()), m);
  CvOptions cv;
  cv.k = o.k;
  cv.seed = o.seed;
  cv.gamma = o.gamma;
  const CVReport r = kfold_cv(d.X, d.y, g, o.grid.empty() ? default_lambda_grid() : o.grid, family, cv);
  json fold_errors = json::array();
  for (Eigen::Index i = 0; i < r.fold_errors.rows(); ++i) fold_errors.push_back(vec_json(r.fold_errors.row(i).transpose()));
  const json doc = {{"family", std::string(to_string(r.family))},
                    {"k", r.k},
                    {"seed", r.seed},
                    {"gamma", r.gamma},
                    {"lambda_grid", r.lambda_grid},
                    {"mean_error", vec_json(r.mean_error)},
                    {"standard_error", vec_json(r.standard_error)},
                    {"fold_errors", fold_errors},
                    {"selected_lambda", r.selected_lambda},
                    {"folds", r.folds}};
  write_json(fs::path(o.out) / "cv.json", doc, m);
  return 0;
}

// --- simulate -------------------------------------------------------------------

int scaled(int base, double scale, int floor_value) {
  return std::max(floor_value, static_cast<int>(std::lround(base * scale)));
}

int cmd_simulate(const Options& o, RunManifest& m) {
  if (!(o.scale > 0.0)) throw InvalidInput("--scale must be positive");
  const fs::path out(o.out);
  if (o.figure == "2" || o.figure == "3") {
    SimConfig cfg;
    cfg.family = o.figure == "2" ? Family::linear : Family::logistic;
    cfg.n = 3 * scaled(100, o.scale, 4);
    cfg.sigma = o.sigma;
    cfg.p = o.p;
    cfg.lambda = o.lambda;
    cfg.gamma = o.gamma;
    cfg.seed = o.seed;
    cfg.replications = o.replications;
    ExperimentOptions eo;
    eo.lambda_grid = o.grid;
    eo.cv_folds = o.k;
    const auto rows = run_experiment(cfg, o.s_grid, eo);
    std::ofstream a = open_output(out / "results.csv", m);
    write_csv(a, rows);
    std::ofstream b = open_output(out / "summary.csv", m);
    write_csv(b, summarize(rows));
  } else if (o.figure == "4") {
    SparsifyExperimentConfig cfg;
    cfg.block_size = scaled(100, o.scale, 2);
    cfg.sigma = o.sigma;
    cfg.p = o.p;
    cfg.lambda = o.lambda;
    cfg.oversampling = o.experiment_oversampling;
    const auto rows = sparsification_experiment(cfg, o.eps_grid, o.seed);
    std::ofstream a = open_output(out / "sparsification.csv", m);
    write_csv(a, rows);
  } else if (o.figure == "example1") {
    SimConfig cfg = example1_config();
    const int size = scaled(100, o.scale, 2);
    cfg.component_sizes = {size, size, size};
    cfg.n = 3 * size;
    cfg.sigma = o.sigma;
    cfg.p = o.p;
    const double lambda = o.lambda > 0.0 ? o.lambda : cfg.lambda;
    std::ofstream os = open_output(out / "example1.csv", m);
    os << std::setprecision(17)
       << "replication,graph,nu,l_alpha_sq,v_alpha,ols_coef_sq,sigma_threshold_alpha,sigma_threshold_beta\n";
    auto row = [&](int rep, const char* kind, const Graph& g, const SimData& d) {
      const TheoryReport r = theory_report(d.X, laplacian(g), lambda, d.alpha, o.sigma * o.sigma);
      double ta = NAN, tb = NAN;
      if (r.nu > 0.0) {
        const OlsComparison c = ols_comparison(r, o.sigma * o.sigma);
        ta = c.sigma_threshold_alpha;
        tb = c.sigma_threshold_beta;
      }
      os << rep << ',' << kind << ',' << r.nu << ',' << r.l_alpha_sq << ',' << r.v_alpha << ',' << r.ols_coef_sq
         << ',' << ta << ',' << tb << '\n';
    };
    for (int rep = 0; rep < o.replications; ++rep) {
      const std::uint64_t base = derive_seed(o.seed, static_cast<std::uint64_t>(rep));
      const GraphDraw draw = generate_graph(cfg, derive_seed(base, 0));
      const SimData d = gen_data(cfg, draw.labels, derive_seed(base, 1));
      row(rep, "random", draw.graph, d);
      if (size == 100) row(rep, "expected", example1_expected_graph(), d);
    }
  } else {
    throw InvalidInput("--figure must be 2, 3, 4 or example1");
  }
  return 0;
}

// --- sparsify -------------------------------------------------------------------

int cmd_sparsify(const Options& o, RunManifest& m) {
  const Graph g = load_graph(o.edges, o.nodes, m);
  SparsifyOptions so;
  so.oversampling = o.oversampling;
  so.verify = !o.no_verify;
  const SparsifyResult r = spectral_sparsify(g, o.epsilon, o.seed, so);
  std::ofstream os = open_output(fs::path(o.out) / "sparsified.tsv", m);
  write_edge_list(os, r.graph_star);
  json cert = {{"epsilon_target", r.epsilon_target},
               {"oversampling", o.oversampling},
               {"samples", r.samples},
               {"nodes", g.node_count()},
               {"edges", g.edge_count()},
               {"edges_kept", r.edges_kept},
               {"verified", r.certificate.verified},
               {"certificate_computed", r.certificate.computed}};
  cert["measured_epsilon"] = r.certificate.computed && std::isfinite(r.certificate.measured_epsilon)
                                 ? json(r.certificate.measured_epsilon)
                                 : json(nullptr);
  write_json(fs::path(o.out) / "certificate.json", cert, m);
  return 0;
}

// --- theory ---------------------------------------------------------------------

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int cmd_theory(const Options& o, RunManifest& m) {
  Graph g;
  Eigen::MatrixXd X;
  Eigen::VectorXd alpha;
  std::string source;
  if (!o.example1.empty()) {
    const SimConfig cfg = example1_config();
    const GraphDraw draw = generate_graph(cfg, derive_seed(o.seed, 0));
    const SimData d = gen_data(cfg, draw.labels, derive_seed(o.seed, 1));
    if (o.example1 == "expected")
      g = example1_expected_graph();
    else if (o.example1 == "random")
      g = draw.graph;
    else
      throw InvalidInput("--example1 must be 'random' or 'expected'");
    X = d.X;
    alpha = d.alpha;
    source = "example1-" + o.example1;
  } else {
    if (o.edges.empty() || o.data.empty()) throw InvalidInput("theory needs --example1 or both --edges and --data");
    m.add_input(o.data);
    const Table t = read_csv(fs::path(o.data));
    alpha = t.values.col(t.column(o.alpha_col));
    std::vector<std::string> drop = o.exclude;
    drop.push_back(o.alpha_col);
    X = t.without(drop).values;
    X.rowwise() -= X.colwise().mean();
    g = load_graph(o.edges, static_cast<int>(t.rows()), m);
    source = "files";
  }
  const double lambda = o.lambda > 0.0 ? o.lambda : 0.1;
  const double sigma2 = o.sigma * o.sigma;
  const LaplacianMatrix L = laplacian(g, o.gamma > 0.0 ? o.gamma : 0.0);
  const TheoryReport r = theory_report(X, L, lambda, alpha, sigma2);

  json doc = {{"source", source},
              {"n", r.n},
              {"p", r.p},
              {"lambda", r.lambda},
              {"sigma", o.sigma},
              {"nu", r.nu},
              {"estimator_exists", r.nu > 0.0},
              {"mu", r.mu},
              {"l_alpha_sq", r.l_alpha_sq},
              {"v_alpha", r.v_alpha},
              {"ols_coef_sq", r.ols_coef_sq},
              {"trace_inv_gram", r.trace_inv_gram},
              {"shrinkage_frob", finite_or_null(r.shrinkage_frob)},
              {"bounds",
               {{"alpha", finite_or_null(r.bounds.alpha)},
                {"beta", finite_or_null(r.bounds.beta)},
                {"pred", finite_or_null(r.bounds.pred)}}}};
  if (r.nu > 0.0) {
    const OlsComparison c = ols_comparison(r, sigma2);
    doc["comparison"] = {{"alpha_favored", c.alpha_favored},
                         {"beta_favored", c.beta_favored},
                         {"sigma_threshold_alpha", c.sigma_threshold_alpha},
                         {"sigma_threshold_beta", c.sigma_threshold_beta}};
    const Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
    const ExactMse e = rnc_exact_mse(X, L, lambda, alpha, beta, sigma2);
    const ExactMse ols = ols_exact_mse(X, alpha, sigma2);
    doc["exact"] = {{"rnc", {{"mse_alpha", e.mse_alpha()}, {"mse_beta", e.mse_beta()}, {"pred_error", e.pred_error()}}},
                    {"ols", {{"mse_alpha", ols.mse_alpha()}, {"mse_beta", ols.mse_beta()}, {"pred_error", ols.pred_error()}}}};
  }
  write_json(fs::path(o.out) / "theory.json", doc, m);
  return 0;
}

json collect_flags(const CLI::App* sub) {
  json flags = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto& res = opt->results();
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    flags[name] = res.size() == 1 ? json(res.front()) : json(res);
  }
  return flags;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression with network cohesion: fitting, prediction, tuning, simulation"};
  app.require_subcommand(1);
  Options o;

  auto shared = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output directory (created if missing)");
    c->add_option("--threads", o.threads, "Worker threads (NETCOH_THREADS takes precedence)")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", o.seed, "Random seed");
  };
  auto data_flags = [&](CLI::App* c) {
    c->add_option("--family", o.family, "linear | logistic | cox")->check(CLI::IsMember({"linear", "logistic", "cox"}));
    c->add_option("--edges", o.edges, "Edge list: u v [w] per line")->required()->check(CLI::ExistingFile);
    c->add_option("--data", o.data, "CSV with a header, one row per node")->required()->check(CLI::ExistingFile);
    c->add_option("--response", o.response, "Response column (linear, logistic)");
    c->add_option("--time", o.time_col, "Survival time column (cox)");
    c->add_option("--event", o.event_col, "Event indicator column (cox)");
    c->add_option("--exclude", o.exclude, "Columns that are not covariates")->delimiter(',');
    c->add_option("--gamma", o.gamma, "Ridge added to the Laplacian (default: family default)");
  };

  CLI::App* fit = app.add_subcommand("fit", "Fit a model and write model.json and fitted.csv");
  shared(fit);
  data_flags(fit);
  fit->add_option("--lambda", o.lambda, "Cohesion penalty weight")->required()->check(CLI::PositiveNumber);

  CLI::App* predict = app.add_subcommand("predict", "Predict training or new nodes from model.json");
  shared(predict);
  predict->add_option("--model", o.model, "model.json from fit")->required()->check(CLI::ExistingFile);
  predict->add_option("--data", o.data, "Covariates CSV; a 'node' column gives node ids")->required()->check(CLI::ExistingFile);
  predict->add_option("--edges", o.edges, "Enlarged edge list with the new nodes")->check(CLI::ExistingFile);
  predict->add_option("--gamma-pred", o.gamma_pred, "Ridge for new nodes (default: training gamma)");

  CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation over a lambda grid");
  shared(cv);
  data_flags(cv);
  cv->add_option("--k", o.k, "Number of folds")->check(CLI::Range(2, 1 << 20));
  cv->add_option("--grid", o.grid, "Comma-separated lambda values")->delimiter(',');

  CLI::App* sim = app.add_subcommand("simulate", "Simulation studies written as tidy CSV");
  shared(sim);
  sim->add_option("--figure", o.figure, "2 (linear), 3 (logistic), 4 (sparsification) or example1")->required();
  sim->add_option("--scale", o.scale, "Multiplier on the number of nodes");
  sim->add_option("--replications", o.replications, "Replications")->check(CLI::PositiveNumber);
  sim->add_option("--s-grid", o.s_grid, "Within-block spreads s")->delimiter(',');
  sim->add_option("--epsilon-grid", o.eps_grid, "Sparsification accuracies")->delimiter(',');
  sim->add_option("--sigma", o.sigma, "Noise sd (linear)")->check(CLI::NonNegativeNumber);
  sim->add_option("--p", o.p, "Number of covariates")->check(CLI::PositiveNumber);
  sim->add_option("--lambda", o.lambda, "Fixed lambda (default: cross-validated)");
  sim->add_option("--gamma", o.gamma, "Laplacian ridge (default: family default)");
  sim->add_option("--grid", o.grid, "Lambda grid for cross-validation")->delimiter(',');
  sim->add_option("--k", o.k, "Cross-validation folds")->check(CLI::Range(2, 1 << 20));
  sim->add_option("--oversampling", o.experiment_oversampling, "Sparsifier constant C (figure 4)");

  CLI::App* spars = app.add_subcommand("sparsify", "Spectral sparsification with a certificate");
  shared(spars);
  spars->add_option("--edges", o.edges, "Edge list")->required()->check(CLI::ExistingFile);
  spars->add_option("--nodes", o.nodes, "Node count (default: largest id + 1)");
  spars->add_option("--epsilon", o.epsilon, "Target accuracy in (0, 1/2)")->required();
  spars->add_option("--oversampling", o.oversampling, "Sample-count constant C");
  spars->add_flag("--no-verify", o.no_verify, "Skip the dense spectral certificate");

  CLI::App* theory = app.add_subcommand("theory", "Finite-sample error bounds for a known truth");
  shared(theory);
  theory->add_option("--example1", o.example1, "Built-in example: random | expected");
  theory->add_option("--edges", o.edges, "Edge list")->check(CLI::ExistingFile);
  theory->add_option("--data", o.data, "CSV with covariates and the true effects")->check(CLI::ExistingFile);
  theory->add_option("--alpha-column", o.alpha_col, "Column holding the true individual effects");
  theory->add_option("--exclude", o.exclude, "Columns that are not covariates")->delimiter(',');
  theory->add_option("--lambda", o.lambda, "Penalty weight (default 0.1)");
  theory->add_option("--sigma", o.sigma, "Noise sd (default 0.5)")->check(CLI::NonNegativeNumber);
  theory->add_option("--gamma", o.gamma, "Laplacian ridge (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    // Record the rejected invocation when we know where outputs would go.
    if (!app.get_subcommands().empty()) {
      CLI::App* sub = app.get_subcommands().front();
      if (sub->count("--out")) {
        std::error_code ec;
        fs::create_directories(o.out, ec);
        if (!ec) {
          RunManifest manifest(sub->get_name());
          manifest.set_flags(collect_flags(sub));
          manifest.fail(kExitUsage, e.what());
          manifest.write(o.out);
        }
      }
    }
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest(sub->get_name());
  manifest.set_flags(collect_flags(sub));
  if (sub->count("--seed") || sub == sim || sub == spars || sub == cv || sub == theory) manifest.set_seed(o.seed);

  if (const char* env = std::getenv("NETCOH_THREADS"); env && std::atoi(env) > 0)
    set_thread_count(std::atoi(env));
  else if (o.threads > 0)
    set_thread_count(o.threads);
  manifest.set_threads(thread_count());

  const fs::path out(o.out);
  try {
    fs::create_directories(out);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: cannot create output directory: " << e.what() << '\n';
    return kExitUsage;
  }

  int code = 0;
  try {
    if (sub == fit) code = cmd_fit(o, manifest);
    else if (sub == predict) code = cmd_predict(o, manifest);
    else if (sub == cv) code = cmd_cv(o, manifest);
    else if (sub == sim) code = cmd_simulate(o, manifest);
    else if (sub == spars) code = cmd_sparsify(o, manifest);
    else code = cmd_theory(o, manifest);
  } catch (const EstimatorDoesNotExist& e) {
    std::cerr << "error: estimator does not exist; set --gamma > 0 (" << e.what() << ")\n";
    manifest.fail(kExitModel, e.what());
    code = kExitModel;
  } catch (const ModelFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    manifest.fail(kExitModel, e.what());
    code = kExitModel;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    manifest.fail(kExitUsage, e.what());
    code = kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    manifest.fail(1, e.what());
    code = 1;
  }
  manifest.write(out);
  return code;
}
