#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "netcoh/graph.hpp"
#include "netcoh/model.hpp"
#include "netcoh/sdd_solver.hpp"

namespace netcoh {

/// Right-censored survival outcome. event[i] = 1 when the event was observed
/// at time[i], 0 when the subject was censored then.
struct SurvivalData {
  Eigen::VectorXd time;
  Eigen::VectorXi event;

  Eigen::Index size() const { return time.size(); }
  /// Positive times, 0/1 events, at least one event. Throws otherwise.
  void validate() const;
  SurvivalData subset(std::span<const NodeId> ids) const;
};

struct GlmOptions {
  double tol = 1e-7;  // gradient norm at convergence
  int max_iter = 100;
  int max_halvings = 20;
  PcgOptions pcg{1e-11, 0, true};
  // Optional starting point (empty means zeros).
  Eigen::VectorXd init_alpha;
  Eigen::VectorXd init_beta;
};

struct GlmFit : FitCore {
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;      // penalized log-likelihood at the returned point
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;  // objective after each accepted iteration
};

// --- logistic ---------------------------------------------------------------

inline constexpr double kEtaClip = 30.0;
inline constexpr double kWeightFloor = 1e-10;

/// ell(alpha + X beta; y) - lambda alpha'(L + gamma I) alpha for a binary y.
/// X is used as given (no standardization).
double logistic_penalized_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const LaplacianMatrix& L, double lambda,
                                    const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);
/// Gradient of the above, stacked as (d/d alpha, d/d beta).
Eigen::VectorXd logistic_penalized_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                            const LaplacianMatrix& L, double lambda,
                                            const Eigen::VectorXd& alpha,
                                            const Eigen::VectorXd& beta);

/// Penalized logistic RNC by Newton steps, each a weighted block-eliminated
/// RNC system, with step-halving. Requires gamma > 0, lambda > 0, y in {0,1}.
GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Graph& g,
                    double lambda, double gamma = 0.01, const GlmOptions& opts = {});
GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LaplacianMatrix& L,
                    double lambda, const GlmOptions& opts = {});

/// Elementwise logistic of alpha + standardize(X) beta, with |eta| clipped at 30.
Eigen::VectorXd logistic_predict_prob(const FitCore& fit, const Eigen::MatrixXd& X_new,
                                      const Eigen::VectorXd& alpha_new);
Eigen::VectorXd logistic(const Eigen::VectorXd& eta);

/// Unpenalized logistic regression on a design used as given (no intercept is
/// added). Returns the coefficient vector. Throws ModelFailure on divergence.
Eigen::VectorXd logistic_regression(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                    int max_iter = 100, double tol = 1e-9);

/// Standard logistic regression with a common intercept (alpha_hat constant).
GlmFit fit_plain_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// --- Cox --------------------------------------------------------------------

/// Breslow partial log-likelihood
///   sum_v event_v [x_v' beta + alpha_v - log sum_{u: t_u >= t_v} exp(x_u' beta + alpha_u)].
double cox_partial_loglik(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                          const Eigen::MatrixXd& X, const SurvivalData& surv);

double cox_penalized_objective(const Eigen::MatrixXd& X, const SurvivalData& surv,
                               const LaplacianMatrix& L, double lambda,
                               const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);
Eigen::VectorXd cox_penalized_gradient(const Eigen::MatrixXd& X, const SurvivalData& surv,
                                       const LaplacianMatrix& L, double lambda,
                                       const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);

/// Penalized Cox RNC by Newton ascent (matrix-free conjugate-gradient Newton
/// directions) with step-halving. Requires gamma > 0 and lambda > 0. The
/// returned individual effects sum to zero.
GlmFit fit_cox(const Eigen::MatrixXd& X, const SurvivalData& surv, const Graph& g, double lambda,
               double gamma = 0.1, const GlmOptions& opts = {});
GlmFit fit_cox(const Eigen::MatrixXd& X, const SurvivalData& surv, const LaplacianMatrix& L,
               double lambda, const GlmOptions& opts = {});

struct CoxRegression {
  Eigen::VectorXd beta;
  Eigen::MatrixXd information;  // observed information at beta
  double loglik = 0.0;
};
/// Unpenalized Cox regression on a design used as given.
CoxRegression cox_regression(const Eigen::MatrixXd& design, const SurvivalData& surv,
                             int max_iter = 100, double tol = 1e-9);

/// Standard Cox model (no individual effects); alpha_hat = 0.
GlmFit fit_plain_cox(const Eigen::MatrixXd& X, const SurvivalData& surv);

/// Predictive partial log-likelihood ell_(train+test) - ell_(train) with the
/// training estimates; test effects are predicted from the network.
/// fit_train must come from the subgraph of g_all induced by train_ids (in
/// that order). Returns 0 for an empty test set.
double ppl_metric(const FitCore& fit_train, const Eigen::MatrixXd& X_all,
                  const SurvivalData& surv_all, std::span<const NodeId> train_ids,
                  std::span<const NodeId> test_ids, const Graph& g_all);

}  // namespace netcoh
