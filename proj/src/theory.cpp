#include "netcoh/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcoh/errors.hpp"
#include "netcoh/sdd_solver.hpp"

namespace netcoh {
namespace {

constexpr Eigen::Index kDenseLimit = 5000;

void check_design(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (X.rows() != L.dim())
    throw InvalidInput("design has " + std::to_string(X.rows()) + " rows but the graph has " +
                       std::to_string(L.dim()) + " nodes");
  if (X.rows() + X.cols() > kDenseLimit) throw InvalidInput("theory evaluators are limited to n + p <= 5000");
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double scale = std::max(1.0, X.col(j).norm() / std::sqrt(n));
    if (std::abs(X.col(j).mean()) > 1e-8 * scale)
      throw InvalidInput("design column " + std::to_string(j) + " is not centered");
  }
}

Eigen::MatrixXd projection(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (X.cols() == 0) return Eigen::MatrixXd::Zero(n, n);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::Index r = qr.rank();
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  return Q * Q.transpose();
}

Eigen::LDLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd G = X.transpose() * X;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (X.cols() > 0 &&
      (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > kSingularPivot * G.diagonal().maxCoeff())))
    throw InvalidInput("X'X is singular (rank-deficient design)");
  return ldlt;
}

// X~'X~ + lambda M = [[I + lambda L, X], [X', X'X]].
Eigen::MatrixXd normal_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& L, double lambda) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::MatrixXd A(n + p, n + p);
  A.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) + lambda * L;
  A.topRightCorner(n, p) = X;
  A.bottomLeftCorner(p, n) = X.transpose();
  A.bottomRightCorner(p, p) = X.transpose() * X;
  return A;
}

Eigen::LDLT<Eigen::MatrixXd> factor_checked(const Eigen::MatrixXd& A) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  const Eigen::VectorXd d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > kSingularPivot * d.cwiseAbs().maxCoeff()))
    throw EstimatorDoesNotExist("the penalized normal equations are singular");
  return ldlt;
}

double min_eigenvalue(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double max_eigenvalue(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[S.rows() - 1];
}

}  // namespace

double assumption_nu(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda) {
  check_design(X, L, lambda);
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n) - projection(X) + lambda * L.dense();
  const double nu = min_eigenvalue(S);
  // eigenvalues of a singular S come out as rounding noise around 0
  return nu > 1e-12 * std::max(1.0, S.diagonal().maxCoeff()) ? nu : 0.0;
}

BiasReport rnc_bias(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                    const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  check_design(X, L, lambda);
  const Eigen::Index n = X.rows(), p = X.cols();
  if (alpha.size() != n || beta.size() != p) throw InvalidInput("rnc_bias: parameter sizes do not match");
  const Eigen::MatrixXd Ld = L.dense();
  const auto ldlt = factor_checked(normal_matrix(X, Ld, lambda));
  Eigen::VectorXd m_theta = Eigen::VectorXd::Zero(n + p);
  m_theta.head(n) = Ld * alpha;

  BiasReport r;
  r.bias = -lambda * ldlt.solve(m_theta);
  const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n) - projection(X) + lambda * Ld;
  r.bias_alpha = -lambda * factor_checked(S).solve(Ld * alpha);
  r.bias_beta = p > 0 ? Eigen::VectorXd(-factor_gram(X).solve(X.transpose() * r.bias_alpha)) : Eigen::VectorXd(0);
  Eigen::VectorXd stacked(n + p);
  stacked << r.bias_alpha, r.bias_beta;
  r.form_gap = (stacked - r.bias).cwiseAbs().maxCoeff();
  return r;
}

ExactMse rnc_exact_mse(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                       const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double sigma2) {
  if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be nonnegative");
  const BiasReport b = rnc_bias(X, L, lambda, alpha, beta);
  const Eigen::Index n = X.rows(), p = X.cols();
  const Eigen::MatrixXd Ld = L.dense();
  const Eigen::MatrixXd A = normal_matrix(X, Ld, lambda);
  const Eigen::MatrixXd Ainv = factor_checked(A).solve(Eigen::MatrixXd::Identity(n + p, n + p));
  // A^{-1} X~'X~ A^{-1} = A^{-1} - lambda A^{-1} M A^{-1}
  const Eigen::MatrixXd Ainv_top = Ainv.topRows(n);
  const Eigen::MatrixXd V = Ainv - lambda * Ainv_top.transpose() * Ld * Ainv_top;
  Eigen::MatrixXd Xt(n, n + p);
  Xt << Eigen::MatrixXd::Identity(n, n), X;
  const Eigen::MatrixXd S = Xt * Ainv * Xt.transpose();

  ExactMse e;
  e.bias_sq_alpha = b.bias.head(n).squaredNorm();
  e.bias_sq_beta = b.bias.tail(p).squaredNorm();
  e.bias_sq_pred = (Xt * b.bias).squaredNorm();
  e.var_alpha = sigma2 * V.topLeftCorner(n, n).trace();
  e.var_beta = sigma2 * V.bottomRightCorner(p, p).trace();
  e.var_pred = sigma2 * S.squaredNorm();
  return e;
}

ExactMse ols_exact_mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& alpha, double sigma2) {
  if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be nonnegative");
  const Eigen::Index n = X.rows(), p = X.cols();
  if (alpha.size() != n) throw InvalidInput("ols_exact_mse: alpha length does not match the design");
  check_design(X, LaplacianMatrix(SparseMatrix(n, n), 0.0), 1.0);
  const auto gram = factor_gram(X);
  const Eigen::VectorXd centered = alpha.array() - alpha.mean();
  ExactMse e;
  e.bias_sq_alpha = centered.squaredNorm();
  e.var_alpha = sigma2;
  if (p > 0) {
    const Eigen::VectorXd coef = gram.solve(X.transpose() * alpha);
    e.bias_sq_beta = coef.squaredNorm();
    e.var_beta = sigma2 * gram.solve(Eigen::MatrixXd::Identity(p, p)).trace();
  }
  // H = 11'/n + P_X; bias (H - I) alpha, variance sigma^2 |H|_F^2.
  const Eigen::MatrixXd H = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)) + projection(X);
  e.bias_sq_pred = (H * alpha - alpha).squaredNorm();
  e.var_pred = sigma2 * H.squaredNorm();
  return e;
}

TheoryReport theory_report(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                           const Eigen::VectorXd& alpha, double sigma2) {
  if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be nonnegative");
  check_design(X, L, lambda);
  const Eigen::Index n = X.rows(), p = X.cols();
  if (alpha.size() != n) throw InvalidInput("alpha length does not match the design");
  TheoryReport r;
  r.n = static_cast<int>(n);
  r.p = static_cast<int>(p);
  r.lambda = lambda;
  r.nu = assumption_nu(X, L, lambda);
  const Eigen::MatrixXd Ld = L.dense();
  r.l_alpha_sq = (Ld * alpha).squaredNorm();
  r.v_alpha = (alpha.array() - alpha.mean()).matrix().squaredNorm();
  if (p > 0) {
    const auto gram = factor_gram(X);
    r.mu = min_eigenvalue(X.transpose() * X);
    r.ols_coef_sq = gram.solve(X.transpose() * alpha).squaredNorm();
    r.trace_inv_gram = gram.solve(Eigen::MatrixXd::Identity(p, p)).trace();
  }
  const Eigen::MatrixXd A = normal_matrix(X, Ld, lambda);
  Eigen::MatrixXd Xt(n, n + p);
  Xt << Eigen::MatrixXd::Identity(n, n), X;
  if (!(r.nu > 0.0)) {
    r.bounds = {INFINITY, INFINITY, INFINITY};
    return r;
  }
  r.shrinkage_frob = (Xt * factor_checked(A).solve(Xt.transpose())).norm();
  const double l2 = lambda * lambda;
  r.bounds.alpha = l2 / (r.nu * r.nu) * r.l_alpha_sq + static_cast<double>(n) / r.nu * sigma2;
  r.bounds.beta = p > 0 ? l2 / (r.nu * r.nu * r.mu) * r.l_alpha_sq + sigma2 * (1.0 / r.nu + 1.0) * r.trace_inv_gram
                        : 0.0;
  r.bounds.pred = l2 / r.nu * r.l_alpha_sq + sigma2 * r.shrinkage_frob * r.shrinkage_frob;
  return r;
}

MseBounds theorem1_bounds(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda,
                          const Eigen::VectorXd& alpha, double sigma2) {
  const TheoryReport r = theory_report(X, L, lambda, alpha, sigma2);
  if (!(r.nu > 0.0))
    throw EstimatorDoesNotExist("nu = 0: the covariates contain a direction with zero cohesion penalty");
  return r.bounds;
}

OlsComparison ols_comparison(const TheoryReport& r, double sigma2) {
  if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be nonnegative");
  if (!(r.nu > 0.0)) throw InvalidInput("ols_comparison: nu must be positive");
  OlsComparison c;
  const double l2 = r.lambda * r.lambda;
  const double alpha_coef = static_cast<double>(r.n) / r.nu - 1.0;
  c.alpha_lhs = alpha_coef * sigma2;
  c.alpha_rhs = r.v_alpha - l2 / (r.nu * r.nu) * r.l_alpha_sq;
  c.alpha_favored = c.alpha_lhs <= c.alpha_rhs;
  if (c.alpha_rhs > 0.0) c.sigma_threshold_alpha = alpha_coef > 0.0 ? std::sqrt(c.alpha_rhs / alpha_coef) : INFINITY;

  const double beta_coef = r.trace_inv_gram / r.nu;
  c.beta_lhs = beta_coef * sigma2;
  c.beta_rhs = r.mu > 0.0 ? r.ols_coef_sq - l2 / r.mu * r.l_alpha_sq : 0.0;
  c.beta_favored = r.p > 0 && c.beta_lhs <= c.beta_rhs;
  if (c.beta_rhs > 0.0 && beta_coef > 0.0) c.sigma_threshold_beta = std::sqrt(c.beta_rhs / beta_coef);
  return c;
}

double linear_strong_convexity(const Eigen::MatrixXd& X, const LaplacianMatrix& L, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (X.rows() != L.dim()) throw InvalidInput("design rows do not match the graph");
  if (X.rows() + X.cols() > kDenseLimit) throw InvalidInput("limited to n + p <= 5000");
  return 2.0 * std::max(0.0, min_eigenvalue(normal_matrix(X, L.dense(), lambda)));
}

SparsificationBound sparsification_bound(const Eigen::VectorXd& alpha_hat,
                                         const Eigen::VectorXd& beta_hat,
                                         const Eigen::VectorXd& alpha_star,
                                         const Eigen::VectorXd& beta_star, const LaplacianMatrix& L,
                                         const LaplacianMatrix& L_star, double lambda,
                                         double epsilon, double m_strong) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidInput("epsilon must lie in (0, 1/2)");
  if (!(m_strong > 0.0)) throw InvalidInput("strong convexity modulus must be positive");
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (L.dim() != L_star.dim() || alpha_hat.size() != L.dim() || alpha_star.size() != L.dim() ||
      beta_hat.size() != beta_star.size())
    throw InvalidInput("sparsification_bound: dimension mismatch");
  SparsificationBound s;
  s.m_strong = m_strong;
  s.observed_sq_diff = (alpha_star - alpha_hat).squaredNorm() + (beta_star - beta_hat).squaredNorm();
  s.a = cohesion_penalty(L, alpha_hat);
  s.b = cohesion_penalty(L_star, alpha_star);
  const double k = 2.0 * epsilon * lambda / m_strong;
  const double first = 2.0 * s.a + std::abs(s.a - s.b) + 2.0 * epsilon * s.b;
  const double top = L.dim() > kDenseLimit ? INFINITY : max_eigenvalue(L.dense());
  const double second = k * top * top * alpha_hat.squaredNorm();
  s.bound = k * std::min(first, second);
  s.bound_essential = 2.0 * k * s.a;
  return s;
}

}  // namespace netcoh
