#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>

#include "netcoh/graph.hpp"

namespace netcoh {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative: |Sx - b| / |b|
  bool converged = false;
};

struct PcgOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 means 10 * dimension
  bool jacobi = true;
};

/// Conjugate gradients with optional Jacobi preconditioning for a sparse
/// symmetric positive definite matrix (I + lambda L qualifies).
/// Throws InvalidInput for non-square or asymmetric S.
std::pair<Eigen::VectorXd, SolveReport> pcg_solve(const SparseMatrix& S, const Eigen::VectorXd& b,
                                                  const PcgOptions& opts = {});

/// Matrix-free variant: apply(x, y) must set y = S x. `diag` is the diagonal
/// of S used for Jacobi scaling (ignored when opts.jacobi is false).
using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
std::pair<Eigen::VectorXd, SolveReport> pcg_solve(const LinearOperator& apply,
                                                  const Eigen::VectorXd& diag,
                                                  const Eigen::VectorXd& b,
                                                  const PcgOptions& opts = {},
                                                  const Eigen::VectorXd* x0 = nullptr);

/// min_i (S_ii - sum_{j != i} |S_ij|). Positive means strictly diagonally
/// dominant; zero for a bare Laplacian.
double diagonal_dominance_margin(const SparseMatrix& S);

/// Linear RNC normal equations: X standardized (column means within 1e-10,
/// unit population variance), lambda > 0.
class RncSystem {
 public:
  RncSystem(const LaplacianMatrix& L, const Eigen::MatrixXd& X, double lambda);

  const LaplacianMatrix& laplacian() const { return *L_; }
  const Eigen::MatrixXd& design() const { return *X_; }
  double lambda() const { return lambda_; }

 private:
  const LaplacianMatrix* L_;
  const Eigen::MatrixXd* X_;
  double lambda_;
};

/// Solution of the (n+p) block system
///   [ W + c L    W X   ] [a1]   [b1]
///   [ X'W        X'W X ] [a2] = [b2]
/// where W = diag(weights) and L carries its own ridge.
struct BlockSolution {
  Eigen::VectorXd a1;
  Eigen::VectorXd a2;
  SolveReport report;  // worst of the inner SDD solves
};

/// Block elimination: SDD solves for Z = (W + cL)^{-1} W X and z = (W + cL)^{-1} b1,
/// a p x p Cholesky solve on the Schur complement, then back-substitution.
/// Throws EstimatorDoesNotExist if the Schur complement is numerically singular.
BlockSolution block_solve(const LaplacianMatrix& L, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& weights, double c, const Eigen::VectorXd& b1,
                          const Eigen::VectorXd& b2, const PcgOptions& opts = {});

struct RncSolution {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  SolveReport report;
};

/// Minimizer of |Y - alpha - X beta|^2 + lambda alpha' L alpha via block elimination.
RncSolution block_eliminate_fit(const RncSystem& sys, const Eigen::VectorXd& Y, double tol = 1e-10);

/// Reference path: dense factorization of the full (n+p) x (n+p) system.
/// Guarded to n + p <= 5000. Throws EstimatorDoesNotExist when singular.
RncSolution dense_solve_oracle(const RncSystem& sys, const Eigen::VectorXd& Y);

/// Relative smallest-pivot threshold below which a factorization is declared singular.
inline constexpr double kSingularPivot = 1e-12;

}  // namespace netcoh
