#include "netcoh/rnc_linear.hpp"

#include <string>

#include "netcoh/errors.hpp"

namespace netcoh {

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const LaplacianMatrix& L,
                     double lambda, double tol) {
  if (Y.size() != L.dim())
    throw InvalidInput("response has " + std::to_string(Y.size()) + " entries but the graph has " +
                       std::to_string(L.dim()) + " nodes");
  LinearFit fit;
  fit.family = Family::linear;
  fit.lambda = lambda;
  fit.gamma = L.ridge();
  fit.standardization = Standardization::fit(X);
  const Eigen::MatrixXd Xs = fit.standardization.apply(X);
  RncSystem sys(L, Xs, lambda);
  try {
    RncSolution s = block_eliminate_fit(sys, Y, tol);
    fit.alpha_hat = std::move(s.alpha);
    fit.beta_hat = std::move(s.beta);
    fit.report = s.report;
  } catch (const EstimatorDoesNotExist& e) {
    if (L.ridge() > 0.0) throw;
    throw EstimatorDoesNotExist(std::string(e.what()) +
                                "; refit with gamma > 0 to regularize the Laplacian");
  }
  return fit;
}

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Graph& g,
                     double lambda, double gamma, double tol) {
  if (X.rows() != g.node_count())
    throw InvalidInput("design has " + std::to_string(X.rows()) + " rows but the graph has " +
                       std::to_string(g.node_count()) + " nodes");
  return fit_linear(X, Y, laplacian(g, gamma), lambda, tol);
}

LinearFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
  if (X.rows() != Y.size()) throw InvalidInput("response length does not match the design");
  LinearFit fit;
  fit.family = Family::linear;
  fit.standardization = Standardization::fit(X);
  const Eigen::MatrixXd Xs = fit.standardization.apply(X);
  const Eigen::MatrixXd gram = Xs.transpose() * Xs;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (Xs.cols() > 0) {
    const Eigen::VectorXd piv = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success ||
        !(piv.minCoeff() > kSingularPivot * gram.diagonal().maxCoeff()))
      throw InvalidInput("ols_fit: design is rank deficient");
    fit.beta_hat = ldlt.solve(Xs.transpose() * Y);
  } else {
    fit.beta_hat = Eigen::VectorXd(0);
  }
  fit.alpha_hat = Eigen::VectorXd::Constant(Y.size(), Y.mean());
  fit.report.converged = true;
  return fit;
}

LinearFit null_model_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                         double gamma, double tol) {
  if (!(gamma > 0.0)) throw InvalidInput("null_model_fit: gamma must be positive");
  return fit_linear(X, Y, Graph(static_cast<int>(Y.size())), lambda, gamma, tol);
}

Eigen::VectorXd fitted_values(const FitCore& fit, const Eigen::MatrixXd& X) {
  return fit.linear_predictor(X);
}

}  // namespace netcoh
