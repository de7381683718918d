#pragma once

#include <Eigen/Dense>

#include "netcoh/graph.hpp"
#include "netcoh/model.hpp"
#include "netcoh/sdd_solver.hpp"

namespace netcoh {

struct LinearFit : FitCore {
  SolveReport report;
};

/// Minimizes |Y - X beta - alpha|^2 + lambda alpha'(L + gamma I) alpha.
/// X is standardized internally; the transform is kept on the fit.
/// Throws EstimatorDoesNotExist when gamma = 0 and the covariates contain a
/// direction on which the Laplacian vanishes.
LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Graph& g,
                     double lambda, double gamma = 0.0, double tol = 1e-10);

/// Same as fit_linear for a prebuilt (ridged) Laplacian.
LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const LaplacianMatrix& L,
                     double lambda, double tol = 1e-10);

/// Ordinary least squares with a common intercept: alpha_hat = mean(Y) 1.
LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

/// RNC on the empty graph: a ridge of strength lambda*gamma on alpha.
LinearFit null_model_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                         double gamma = 1.0, double tol = 1e-10);

/// alpha_hat + standardize(X) beta_hat.
Eigen::VectorXd fitted_values(const FitCore& fit, const Eigen::MatrixXd& X);

}  // namespace netcoh
