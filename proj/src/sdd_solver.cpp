#include "netcoh/sdd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "netcoh/errors.hpp"
#include "netcoh/parallel.hpp"

namespace netcoh {

std::pair<Eigen::VectorXd, SolveReport> pcg_solve(const LinearOperator& apply,
                                                  const Eigen::VectorXd& diag,
                                                  const Eigen::VectorXd& b, const PcgOptions& opts,
                                                  const Eigen::VectorXd* x0) {
  if (!(opts.tol > 0.0)) throw InvalidInput("pcg_solve: tolerance must be positive");
  const Eigen::Index n = b.size();
  SolveReport rep;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    return {x, rep};
  }
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * std::max<Eigen::Index>(n, 1));

  Eigen::VectorXd inv_diag = Eigen::VectorXd::Ones(n);
  if (opts.jacobi) {
    if (diag.size() != n) throw InvalidInput("pcg_solve: diagonal has the wrong length");
    for (Eigen::Index i = 0; i < n; ++i) inv_diag[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
  }

  Eigen::VectorXd r = b, Ap(n);
  if (x0 != nullptr && x0->size() == n) {
    x = *x0;
    apply(x, Ap);
    r = b - Ap;
  }
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  double res = r.norm() / bnorm;

  while (res > opts.tol && rep.iterations < max_iter) {
    apply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) break;  // operator not positive definite along p
    const double step = rz / pAp;
    x.noalias() += step * p;
    r.noalias() -= step * Ap;
    ++rep.iterations;
    res = r.norm() / bnorm;
    if (res <= opts.tol) {
      // guard against drift of the recursive residual
      apply(x, Ap);
      r = b - Ap;
      res = r.norm() / bnorm;
      if (res <= opts.tol) break;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  rep.final_residual = res;
  rep.converged = res <= opts.tol;
  return {x, rep};
}

std::pair<Eigen::VectorXd, SolveReport> pcg_solve(const SparseMatrix& S, const Eigen::VectorXd& b,
                                                  const PcgOptions& opts) {
  if (S.rows() != S.cols()) throw InvalidInput("pcg_solve: matrix must be square");
  if (S.rows() != b.size()) throw InvalidInput("pcg_solve: right-hand side has the wrong length");
  const SparseMatrix St = S.transpose();
  const double asym = (S - St).norm();
  if (asym > 1e-12 * std::max(1.0, S.norm())) throw InvalidInput("pcg_solve: matrix is not symmetric");
  Eigen::VectorXd diag = S.diagonal();
  return pcg_solve([&S](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = S * x; },
                   diag, b, opts);
}

double diagonal_dominance_margin(const SparseMatrix& S) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(S.rows());
  Eigen::VectorXd off = Eigen::VectorXd::Zero(S.rows());
  for (int k = 0; k < S.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(S, k); it; ++it) {
      if (it.row() == it.col())
        diag[it.row()] += it.value();
      else
        off[it.row()] += std::abs(it.value());
    }
  }
  return S.rows() == 0 ? 0.0 : (diag - off).minCoeff();
}

RncSystem::RncSystem(const LaplacianMatrix& L, const Eigen::MatrixXd& X, double lambda)
    : L_(&L), X_(&X), lambda_(lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (X.rows() != L.dim())
    throw InvalidInput("design has " + std::to_string(X.rows()) + " rows but the graph has " +
                       std::to_string(L.dim()) + " nodes");
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double var = X.col(j).squaredNorm() / n - mean * mean;
    if (std::abs(mean) > 1e-10 || std::abs(var - 1.0) > 1e-8)
      throw InvalidInput("design column " + std::to_string(j) + " is not standardized");
  }
}

BlockSolution block_solve(const LaplacianMatrix& L, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& weights, double c, const Eigen::VectorXd& b1,
                          const Eigen::VectorXd& b2, const PcgOptions& opts) {
  const Eigen::Index n = L.dim();
  const Eigen::Index p = X.cols();
  if (X.rows() != n || weights.size() != n || b1.size() != n || b2.size() != p)
    throw InvalidInput("block_solve: dimension mismatch");

  SparseMatrix A = c * L.matrix();
  for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) += weights[i];
  A.makeCompressed();
  const Eigen::VectorXd diag = A.diagonal();
  const LinearOperator apply = [&A](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = A * x;
  };

  const Eigen::MatrixXd WX = weights.asDiagonal() * X;
  Eigen::MatrixXd Z(n, p);
  Eigen::VectorXd z;
  std::vector<SolveReport> reports(static_cast<std::size_t>(p + 1));
  parallel_for(static_cast<std::size_t>(p + 1), [&](std::size_t j) {
    if (static_cast<Eigen::Index>(j) == p) {
      auto [sol, rep] = pcg_solve(apply, diag, b1, opts);
      z = std::move(sol);
      reports[j] = rep;
    } else {
      auto [sol, rep] = pcg_solve(apply, diag, WX.col(static_cast<Eigen::Index>(j)), opts);
      Z.col(static_cast<Eigen::Index>(j)) = sol;
      reports[j] = rep;
    }
  });

  BlockSolution out;
  out.report.converged = true;
  for (const auto& r : reports) {
    out.report.iterations = std::max(out.report.iterations, r.iterations);
    out.report.final_residual = std::max(out.report.final_residual, r.final_residual);
    out.report.converged = out.report.converged && r.converged;
  }

  if (p == 0) {
    out.a1 = z;
    out.a2 = Eigen::VectorXd(0);
    return out;
  }

  // X'WX - X'W (W + cL)^{-1} W X, written as c Z' L X so that directions with
  // L X = 0 come out exactly singular instead of as cancellation noise.
  const Eigen::MatrixXd LX = L.matrix() * X;
  Eigen::MatrixXd schur = c * (Z.transpose() * LX);
  schur = 0.5 * (schur + schur.transpose()).eval();

  const double scale = (X.transpose() * WX).diagonal().maxCoeff();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
  const Eigen::VectorXd piv = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(piv.minCoeff() > kSingularPivot * scale))
    throw EstimatorDoesNotExist(
        "the covariates contain a direction with zero cohesion penalty; the estimator does not "
        "exist (use a positive ridge gamma)");

  out.a2 = ldlt.solve(b2 - WX.transpose() * z);
  out.a1 = z - Z * out.a2;
  return out;
}

RncSolution block_eliminate_fit(const RncSystem& sys, const Eigen::VectorXd& Y, double tol) {
  const Eigen::MatrixXd& X = sys.design();
  if (Y.size() != X.rows()) throw InvalidInput("response length does not match the design");
  PcgOptions opts;
  opts.tol = tol;
  BlockSolution s = block_solve(sys.laplacian(), X, Eigen::VectorXd::Ones(X.rows()), sys.lambda(), Y,
                                X.transpose() * Y, opts);
  return {std::move(s.a1), std::move(s.a2), s.report};
}

RncSolution dense_solve_oracle(const RncSystem& sys, const Eigen::VectorXd& Y) {
  const Eigen::MatrixXd& X = sys.design();
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n + p > 5000) throw InvalidInput("dense_solve_oracle: n + p exceeds 5000");
  if (Y.size() != n) throw InvalidInput("response length does not match the design");

  Eigen::MatrixXd A(n + p, n + p);
  A.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) + sys.lambda() * sys.laplacian().dense();
  A.topRightCorner(n, p) = X;
  A.bottomLeftCorner(p, n) = X.transpose();
  A.bottomRightCorner(p, p) = X.transpose() * X;
  Eigen::VectorXd rhs(n + p);
  rhs << Y, X.transpose() * Y;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  const Eigen::VectorXd piv = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(piv.minCoeff() > kSingularPivot * piv.cwiseAbs().maxCoeff()))
    throw EstimatorDoesNotExist("the (n+p) RNC system is singular; the estimator does not exist");
  Eigen::VectorXd theta = ldlt.solve(rhs);
  RncSolution out;
  out.alpha = theta.head(n);
  out.beta = theta.tail(p);
  out.report.converged = true;
  out.report.final_residual = (A * theta - rhs).norm() / std::max(rhs.norm(), 1e-300);
  return out;
}

}  // namespace netcoh
