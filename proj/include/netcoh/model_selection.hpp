#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "netcoh/graph.hpp"
#include "netcoh/model.hpp"
#include "netcoh/rnc_glm.hpp"

namespace netcoh {

/// Individual effects of new nodes that minimize the cohesion penalty over
/// the enlarged network with the training effects held fixed:
///   (L11 + gamma_pred I) alpha_new = -L12 alpha_train.
/// Throws InvalidInput naming the new nodes with no path to a training node
/// when gamma_pred = 0 makes the system singular.
Eigen::VectorXd predict_new_nodes(const Eigen::VectorXd& alpha_train, const LaplacianBlocks& blocks,
                                  double gamma_pred);

/// Positions (within blocks.test_ids) of new nodes with no path to any
/// training node through the enlarged graph.
std::vector<int> unreachable_new_nodes(const LaplacianBlocks& blocks);

using Response = std::variant<Eigen::VectorXd, SurvivalData>;

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 1;
  double gamma = -1.0;  // negative means the family default
  int threads = 0;      // 0 means thread_count()
  GlmOptions glm;
};

struct CVReport {
  Family family = Family::linear;
  int k = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::vector<double> lambda_grid;  // strictly increasing
  Eigen::MatrixXd fold_errors;      // grid x k
  Eigen::VectorXd mean_error;
  Eigen::VectorXd standard_error;
  double selected_lambda = 0.0;
  std::vector<int> folds;  // fold index per node
};

/// count log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);
/// 20 log-spaced values over [1e-3, 1e2].
std::vector<double> default_lambda_grid();

/// Uniform random partition of 0..n-1 into k folds of near-equal size.
std::vector<int> fold_assignment(int n, int k, std::uint64_t seed);

/// k-fold cross-validation over lambda. Each fold is fitted on the subgraph
/// induced by the remaining nodes, held-out effects are predicted from the
/// network, and the fold is scored by mean squared error (linear), mean
/// deviance (logistic) or negative predictive partial log-likelihood (Cox).
/// Held-out nodes without any path to a training node are given the mean
/// training effect. Ties in mean error go to the larger lambda.
CVReport kfold_cv(const Eigen::MatrixXd& X, const Response& y, const Graph& g,
                  std::vector<double> lambda_grid, Family family, const CvOptions& opts = {});

/// Mean squared difference between a prediction and the true mean.
double mspe(const Eigen::VectorXd& prediction, const Eigen::VectorXd& truth_mean);
/// In-sample variant: prediction = alpha_hat + standardize(X) beta_hat.
double mspe(const FitCore& fit, const Eigen::MatrixXd& X, const Eigen::VectorXd& truth_mean);

/// 1 - err_model / err_baseline. Throws InvalidInput when err_baseline <= 0.
double relative_improvement(double err_model, double err_baseline);

struct ForwardSelection {
  std::vector<int> order;        // column indices in order of entry
  std::vector<double> criterion; // RSS (linear) or partial log-likelihood (Cox) after each entry
  std::vector<int> skipped;      // constant columns
};

/// Greedy forward selection. Linear: OLS with intercept, minimizing the
/// residual sum of squares. Cox: maximizing the partial log-likelihood.
/// Ties go to the lower column index. max_steps < 0 means the whole pool.
ForwardSelection forward_selection(const Eigen::MatrixXd& X_pool, const Response& y, Family family,
                                   int max_steps = -1);

/// Two-sided Wald p-values of univariate Cox fits, one per column
/// (NaN for constant columns).
Eigen::VectorXd univariate_cox_pvalues(const Eigen::MatrixXd& X, const SurvivalData& surv);

}  // namespace netcoh
