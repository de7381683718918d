#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netcoh/graph.hpp"
#include "netcoh/model.hpp"
#include "netcoh/model_selection.hpp"

namespace netcoh {

/// Independent 64-bit seed for stream `stream` of a run seeded with `seed`
/// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class GraphModel { sbm, er_components };

struct SimConfig {
  Family family = Family::linear;
  GraphModel graph = GraphModel::sbm;
  int n = 300;
  std::vector<double> pi = {1.0 / 3, 1.0 / 3, 1.0 / 3};  // block probabilities
  double p_w = 0.5;
  double p_b = 0.1;
  std::vector<int> component_sizes = {100, 100, 100};  // er_components only
  double p_edge = 0.05;                                // er_components only
  std::vector<double> eta = {-1.0, 0.0, 1.0};          // block means of alpha
  double s = 0.1;                                      // within-block sd of alpha
  double sigma = 0.5;                                  // linear noise sd
  int p = 2;
  double lambda = 0.0;   // <= 0: tuned by cross-validation
  double gamma = -1.0;   // < 0: family default
  double censoring = 0.3;  // cox: target censored fraction
  std::uint64_t seed = 1;
  int replications = 50;

  int blocks() const { return static_cast<int>(eta.size()); }
  /// Throws InvalidInput on violated invariants.
  void validate() const;
};

/// The network, covariates and effects of the illustrative three-component
/// example: ER(100, 0.05) components, alpha ~ N((-1, 0, 1), 0.1^2), p = 2.
SimConfig example1_config();
/// Its expected adjacency: each component a clique with edge weight 0.05.
Graph example1_expected_graph();

struct GraphDraw {
  Graph graph;
  std::vector<int> labels;  // block or component of each node
};

/// Labels ~ multinomial(pi), edges independent Bernoulli(p_w or p_b).
GraphDraw sbm_generate(const SimConfig& cfg, std::uint64_t seed);
/// Disjoint Erdos-Renyi components; labels are component indices.
GraphDraw er_components_generate(const std::vector<int>& sizes, double p_edge, std::uint64_t seed);
/// Dispatches on cfg.graph.
GraphDraw generate_graph(const SimConfig& cfg, std::uint64_t seed);

struct SimData {
  Eigen::MatrixXd X;          // standardized
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd mean;       // E Y (linear), success probabilities (logistic), alpha + X beta (cox)
  Response y;
};

/// alpha_i ~ N(eta_{c_i}, s^2), beta_j ~ N(1, 1), X standard normal then
/// standardized. Linear: Y = alpha + X beta + N(0, sigma^2). Logistic:
/// Bernoulli(logistic(alpha + X beta)). Cox: exponential times with rate
/// exp(alpha + X beta) and independent uniform censoring scaled so that a
/// fraction cfg.censoring of the sample is censored.
SimData gen_data(const SimConfig& cfg, const std::vector<int>& labels, std::uint64_t seed);

enum class Method { baseline, rnc, null_model, oracle };
std::string_view to_string(Method m);

struct ExperimentOptions {
  std::vector<Method> methods = {Method::baseline, Method::rnc, Method::null_model, Method::oracle};
  std::vector<double> lambda_grid;  // empty: default_lambda_grid()
  int cv_folds = 10;
  int threads = 0;
};

/// One (s, replication, method) cell. Errors are per-coordinate means:
/// |alpha_hat - alpha|^2 / n, |beta_hat - beta|^2 / p and |mean_hat - mean|^2 / n
/// (mean is E Y for linear and the success probability for logistic).
struct ExperimentRow {
  double s = 0.0;
  int replication = 0;
  Method method = Method::baseline;
  double lambda = 0.0;
  double mse_alpha = 0.0;
  double mse_beta = 0.0;
  double mse_pred = 0.0;
  double improvement_alpha = 0.0;  // 1 - mse / mse of the baseline in the same cell
  double improvement_beta = 0.0;
  double improvement_pred = 0.0;
  bool ok = true;
  std::string error;
};

/// Linear or logistic simulation over s_grid: for each replication a fresh
/// graph and data set, every method fitted and compared with the baseline
/// (OLS or plain logistic). RNC and the null model are tuned by k-fold CV
/// unless cfg.lambda > 0. Replications run in parallel with derived seeds.
std::vector<ExperimentRow> run_experiment(const SimConfig& cfg, const std::vector<double>& s_grid,
                                          const ExperimentOptions& opts = {});

struct ExperimentSummary {
  double s = 0.0;
  Method method = Method::baseline;
  int replications = 0;  // successful cells
  double mse_alpha = 0.0, mse_beta = 0.0, mse_pred = 0.0;
  /// 1 - mean mse / mean baseline mse over replications where both succeeded.
  double improvement_alpha = 0.0, improvement_beta = 0.0, improvement_pred = 0.0;
};
std::vector<ExperimentSummary> summarize(const std::vector<ExperimentRow>& rows);

struct SparsifyExperimentConfig {
  int block_size = 100;
  int blocks = 3;
  double w_within = 1.0;
  double w_between = 0.1;
  double s = 0.1;
  double sigma = 0.5;
  int p = 2;
  double lambda = 0.0;        // <= 0: tuned by CV on the dense graph
  double oversampling = 1.0;  // sparsifier constant C
};

struct SparsifyExperimentRow {
  double epsilon = 0.0;
  double lambda = 0.0;
  std::size_t samples = 0;
  std::size_t edges = 0;
  std::size_t edges_kept = 0;
  double zero_fraction = 0.0;     // off-diagonal adjacency entries removed
  double measured_epsilon = 0.0;  // certificate of the sparsified Laplacian
  bool verified = false;          // measured <= target
  double observed_sq_diff = 0.0;  // |theta* - theta|^2
  double bound = 0.0;             // evaluated at the measured epsilon (NaN if >= 1/2)
  double bound_essential = 0.0;
  double improvement_alpha = 0.0;  // 1 - mse(alpha*) / mse(alpha_hat)
  double improvement_beta = 0.0;
};

/// Dense block graph, one data set, and for each epsilon a sparsified fit
/// compared with the dense fit at the same lambda.
std::vector<SparsifyExperimentRow> sparsification_experiment(const SparsifyExperimentConfig& cfg,
                                                             const std::vector<double>& epsilon_grid,
                                                             std::uint64_t seed);

/// Dense weighted block graph: every pair connected, weight by block membership.
Graph dense_block_graph(int block_size, int blocks, double w_within, double w_between);

void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);
void write_csv(std::ostream& os, const std::vector<ExperimentSummary>& rows);
void write_csv(std::ostream& os, const std::vector<SparsifyExperimentRow>& rows);

}  // namespace netcoh
