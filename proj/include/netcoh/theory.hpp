#pragma once

#include <Eigen/Dense>

#include "netcoh/graph.hpp"

// Finite-sample quantities of the linear estimator with a known truth.
// Everything here is dense and meant for desk-scale problems (n + p <= 5000).
// X must have centered columns; it is used as given (no standardization).

namespace netcoh {

/// Smallest eigenvalue of P_{X-perp} + lambda L. Positive iff the estimator exists.
double assumption_nu(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda);

struct BiasReport {
  Eigen::VectorXd bias;        // -lambda (X~'X~ + lambda M)^{-1} M theta, length n + p
  Eigen::VectorXd bias_alpha;  // -(P_{X-perp}/lambda + L)^{-1} L alpha
  Eigen::VectorXd bias_beta;   // -(X'X)^{-1} X' bias_alpha
  double form_gap = 0.0;       // max abs difference of the two forms
};

/// Throws EstimatorDoesNotExist when the system is singular.
BiasReport rnc_bias(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                    const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);

/// Squared bias and total variance of each estimated quantity. Prediction
/// error is the total E|Y_hat - E Y|^2 (not divided by n).
struct ExactMse {
  double bias_sq_alpha = 0.0, var_alpha = 0.0;
  double bias_sq_beta = 0.0, var_beta = 0.0;
  double bias_sq_pred = 0.0, var_pred = 0.0;

  double mse_alpha() const { return bias_sq_alpha + var_alpha; }
  double mse_beta() const { return bias_sq_beta + var_beta; }
  double pred_error() const { return bias_sq_pred + var_pred; }
};

ExactMse rnc_exact_mse(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                       const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double sigma2);

/// Exact errors of OLS with a common intercept (alpha_hat = mean(Y) 1).
/// Throws InvalidInput for a rank-deficient X.
ExactMse ols_exact_mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& alpha, double sigma2);

struct MseBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double pred = 0.0;  // total prediction error
};

struct TheoryReport {
  int n = 0;
  int p = 0;
  double lambda = 0.0;
  double nu = 0.0;
  double mu = 0.0;               // smallest eigenvalue of X'X
  double l_alpha_sq = 0.0;       // |L alpha|^2
  double v_alpha = 0.0;          // sum (alpha_v - mean alpha)^2
  double ols_coef_sq = 0.0;      // |(X'X)^{-1} X' alpha|^2
  double trace_inv_gram = 0.0;   // tr((X'X)^{-1})
  double shrinkage_frob = 0.0;   // |X~ (X~'X~ + lambda M)^{-1} X~'|_F
  MseBounds bounds;              // filled for a given sigma2
};

/// Right-hand sides of the three error bounds. Throws EstimatorDoesNotExist when nu = 0.
MseBounds theorem1_bounds(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                          const Eigen::VectorXd& alpha, double sigma2);

/// All scalar quantities plus the bounds at sigma2 (infinite when nu = 0).
TheoryReport theory_report(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                           const Eigen::VectorXd& alpha, double sigma2);

struct OlsComparison {
  // alpha: (n/nu - 1) sigma^2 <= V(alpha) - lambda^2/nu^2 |L alpha|^2
  double alpha_lhs = 0.0, alpha_rhs = 0.0;
  // beta: tr((X'X)^{-1}) sigma^2/nu <= |(X'X)^{-1}X'alpha|^2 - lambda^2/mu |L alpha|^2
  double beta_lhs = 0.0, beta_rhs = 0.0;
  bool alpha_favored = false;  // network estimator has the lower error bound
  bool beta_favored = false;
  // Largest noise level for which each inequality holds (0 if none).
  double sigma_threshold_alpha = 0.0;
  double sigma_threshold_beta = 0.0;
};

/// Evaluates both comparison inequalities exactly as stated, using n from
/// the report's quantities.
OlsComparison ols_comparison(const TheoryReport& report, double sigma2);

struct SparsificationBound {
  double observed_sq_diff = 0.0;  // |theta* - theta|^2
  double bound = 0.0;             // min-form bound
  double bound_essential = 0.0;   // 4 eps lambda a / m
  double a = 0.0;                 // alpha' L alpha
  double b = 0.0;                 // alpha*' L* alpha*
  double m_strong = 0.0;
};

/// Bound on the distance between the estimates under L and under an
/// eps-spectral approximation L*; both fits use the same lambda and design.
/// Requires 0 < epsilon < 1/2 and m_strong > 0.
SparsificationBound sparsification_bound(const Eigen::VectorXd& alpha_hat,
                                         const Eigen::VectorXd& beta_hat,
                                         const Eigen::VectorXd& alpha_star,
                                         const Eigen::VectorXd& beta_star, const LaplacianMatrix& L,
                                         const LaplacianMatrix& L_star, double lambda,
                                         double epsilon, double m_strong);

/// Strong convexity modulus of the squared-error objective,
/// 2 lambda_min(X~'X~ + lambda M), for a (ridged) Laplacian.
double linear_strong_convexity(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda);

}  // namespace netcoh
