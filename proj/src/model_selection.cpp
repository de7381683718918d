#include "netcoh/model_selection.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "netcoh/errors.hpp"
#include "netcoh/parallel.hpp"
#include "netcoh/rnc_linear.hpp"

namespace netcoh {

std::vector<int> unreachable_new_nodes(const LaplacianBlocks& blocks) {
  const Eigen::Index n1 = blocks.l11.rows();
  std::vector<char> reached(static_cast<std::size_t>(n1), 0);
  std::vector<int> stack;
  const SparseMatrix l12 = blocks.l12;  // copy so rows can be scanned in column-major form
  for (Eigen::Index j = 0; j < l12.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(l12, j); it; ++it)
      if (it.value() != 0.0 && !reached[it.row()]) {
        reached[it.row()] = 1;
        stack.push_back(static_cast<int>(it.row()));
      }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (SparseMatrix::InnerIterator it(blocks.l11, u); it; ++it)
      if (it.row() != u && it.value() != 0.0 && !reached[it.row()]) {
        reached[it.row()] = 1;
        stack.push_back(static_cast<int>(it.row()));
      }
  }
  std::vector<int> out;
  for (Eigen::Index i = 0; i < n1; ++i)
    if (!reached[i]) out.push_back(static_cast<int>(i));
  return out;
}

Eigen::VectorXd predict_new_nodes(const Eigen::VectorXd& alpha_train, const LaplacianBlocks& blocks,
                                  double gamma_pred) {
  if (alpha_train.size() != blocks.l12.cols())
    throw InvalidInput("predict_new_nodes: " + std::to_string(alpha_train.size()) +
                       " training effects for " + std::to_string(blocks.l12.cols()) +
                       " training nodes");
  if (!(gamma_pred >= 0.0)) throw InvalidInput("predict_new_nodes: gamma_pred must be >= 0");
  if (gamma_pred == 0.0) {
    const std::vector<int> lost = unreachable_new_nodes(blocks);
    if (!lost.empty()) {
      std::string ids;
      for (std::size_t i = 0; i < lost.size() && i < 10; ++i)
        ids += (i ? ", " : "") + std::to_string(blocks.test_ids[lost[i]]);
      if (lost.size() > 10) ids += ", ...";
      throw InvalidInput("new nodes with no path to a training node: " + ids +
                         "; pass a positive gamma_pred");
    }
  }
  const Eigen::Index n1 = blocks.l11.rows();
  SparseMatrix A = blocks.l11;
  if (gamma_pred > 0.0) {
    SparseMatrix I(n1, n1);
    I.setIdentity();
    A += gamma_pred * I;
  }
  const Eigen::VectorXd rhs = -(blocks.l12 * alpha_train);
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  if (solver.info() != Eigen::Success)
    throw ModelFailure("predict_new_nodes: factorization failed");
  Eigen::VectorXd out = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !out.allFinite())
    throw ModelFailure("predict_new_nodes: solve failed");
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw InvalidInput("log_grid: need 0 < lo <= hi, count >= 1");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) g[i] = std::exp(a + (b - a) * i / (count - 1));
  return g;
}

std::vector<double> default_lambda_grid() { return log_grid(1e-3, 1e2, 20); }

std::vector<int> fold_assignment(int n, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("cross-validation needs k >= 2");
  if (n < k) throw InvalidInput("cross-validation needs at least k nodes");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fold[perm[i]] = i % k;
  return fold;
}

namespace {

struct FoldSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> test;
};

std::vector<FoldSplit> make_splits(const std::vector<int>& fold, int k) {
  std::vector<FoldSplit> splits(static_cast<std::size_t>(k));
  for (std::size_t v = 0; v < fold.size(); ++v)
    for (int f = 0; f < k; ++f)
      (fold[v] == f ? splits[f].test : splits[f].train).push_back(static_cast<NodeId>(v));
  return splits;
}

bool folds_have_events(const std::vector<FoldSplit>& splits, const SurvivalData& s) {
  for (const FoldSplit& sp : splits) {
    int train_events = 0, test_events = 0;
    for (NodeId v : sp.train) train_events += s.event[v];
    for (NodeId v : sp.test) test_events += s.event[v];
    if (train_events == 0 || test_events == 0) return false;
  }
  return true;
}

Eigen::MatrixXd rows(const Eigen::MatrixXd& X, const std::vector<NodeId>& ids) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), X.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(ids[i]);
  return out;
}

Eigen::VectorXd entries(const Eigen::VectorXd& y, const std::vector<NodeId>& ids) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[ids[i]];
  return out;
}

// Network prediction for held-out nodes; nodes cut off from training get the
// mean training effect.
Eigen::VectorXd held_out_alpha(const Eigen::VectorXd& alpha_train, const LaplacianBlocks& blocks,
                               double gamma) {
  const std::vector<int> lost = unreachable_new_nodes(blocks);
  if (lost.empty() || gamma > 0.0) {
    Eigen::VectorXd a = predict_new_nodes(alpha_train, blocks, gamma);
    if (gamma > 0.0)
      for (int i : lost) a[i] = alpha_train.mean();
    return a;
  }
  // Solve on the reachable part only; it is nonsingular without a ridge.
  const Eigen::Index n1 = blocks.l11.rows();
  std::vector<char> is_lost(static_cast<std::size_t>(n1), 0);
  for (int i : lost) is_lost[i] = 1;
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < n1; ++i)
    if (!is_lost[i]) keep.push_back(static_cast<int>(i));
  Eigen::VectorXd out = Eigen::VectorXd::Constant(n1, alpha_train.mean());
  if (keep.empty()) return out;
  std::vector<int> pos(static_cast<std::size_t>(n1), -1);
  for (std::size_t j = 0; j < keep.size(); ++j) pos[keep[j]] = static_cast<int>(j);
  LaplacianBlocks sub;
  const auto m = static_cast<Eigen::Index>(keep.size());
  std::vector<Eigen::Triplet<double>> t11, t12;
  for (Eigen::Index c = 0; c < blocks.l11.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(blocks.l11, c); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) t11.emplace_back(pos[it.row()], pos[it.col()], it.value());
  for (Eigen::Index c = 0; c < blocks.l12.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(blocks.l12, c); it; ++it)
      if (pos[it.row()] >= 0) t12.emplace_back(pos[it.row()], it.col(), it.value());
  sub.l11.resize(m, m);
  sub.l12.resize(m, blocks.l12.cols());
  sub.l11.setFromTriplets(t11.begin(), t11.end());
  sub.l12.setFromTriplets(t12.begin(), t12.end());
  for (int i : keep) sub.test_ids.push_back(blocks.test_ids[i]);
  const Eigen::VectorXd a = predict_new_nodes(alpha_train, sub, 0.0);
  for (std::size_t j = 0; j < keep.size(); ++j) out[keep[j]] = a[static_cast<Eigen::Index>(j)];
  return out;
}

double logistic_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& prob) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double p = std::clamp(prob[i], 1e-15, 1.0 - 1e-15);
    dev -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
  }
  return dev / static_cast<double>(y.size());
}

}  // namespace

CVReport kfold_cv(const Eigen::MatrixXd& X, const Response& y, const Graph& g,
                  std::vector<double> lambda_grid, Family family, const CvOptions& opts) {
  const int n = g.node_count();
  if (X.rows() != n) throw InvalidInput("kfold_cv: design rows do not match the graph");
  if (lambda_grid.empty()) throw InvalidInput("kfold_cv: empty lambda grid");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw InvalidInput("kfold_cv: lambda values must be positive");
    if (i > 0 && lambda_grid[i] == lambda_grid[i - 1])
      throw InvalidInput("kfold_cv: repeated lambda value");
  }
  const bool is_cox = family == Family::cox;
  if (is_cox != std::holds_alternative<SurvivalData>(y))
    throw InvalidInput("kfold_cv: response type does not match the family");
  if (!is_cox && std::get<Eigen::VectorXd>(y).size() != n)
    throw InvalidInput("kfold_cv: response length does not match the graph");
  if (is_cox) {
    std::get<SurvivalData>(y).validate();
    if (std::get<SurvivalData>(y).size() != n)
      throw InvalidInput("kfold_cv: survival data length does not match the graph");
  }

  CVReport rep;
  rep.family = family;
  rep.k = opts.k;
  rep.seed = opts.seed;
  rep.gamma = opts.gamma < 0.0 ? default_gamma(family) : opts.gamma;
  rep.lambda_grid = lambda_grid;
  rep.folds = fold_assignment(n, opts.k, opts.seed);
  std::vector<FoldSplit> splits = make_splits(rep.folds, opts.k);
  if (is_cox && !folds_have_events(splits, std::get<SurvivalData>(y))) {
    rep.folds = fold_assignment(n, opts.k, opts.seed ^ 0x9e3779b97f4a7c15ULL);
    splits = make_splits(rep.folds, opts.k);
    if (!folds_have_events(splits, std::get<SurvivalData>(y)))
      throw ModelFailure("kfold_cv: a fold has no events after refolding; use fewer folds");
  }

  const auto m = static_cast<Eigen::Index>(lambda_grid.size());
  rep.fold_errors.resize(m, opts.k);
  parallel_for(
      static_cast<std::size_t>(opts.k),
      [&](std::size_t f) {
        const FoldSplit& sp = splits[f];
        const Graph g_train = g.induced_subgraph(sp.train);
        const LaplacianMatrix L = laplacian(g_train, rep.gamma);
        const LaplacianBlocks blocks = split_for_prediction(g, sp.test);
        const Eigen::MatrixXd X_train = rows(X, sp.train);
        const Eigen::MatrixXd X_test = rows(X, sp.test);
        GlmOptions glm = opts.glm;
        // Largest lambda first so each GLM fit warm-starts from a smoother one.
        for (Eigen::Index i = m - 1; i >= 0; --i) {
          const double lambda = lambda_grid[static_cast<std::size_t>(i)];
          double err = 0.0;
          if (family == Family::linear) {
            const Eigen::VectorXd& Y = std::get<Eigen::VectorXd>(y);
            const LinearFit fit = fit_linear(X_train, entries(Y, sp.train), L, lambda);
            const Eigen::VectorXd a = held_out_alpha(fit.alpha_hat, blocks, rep.gamma);
            err = (entries(Y, sp.test) - fit.linear_predictor(X_test, a)).squaredNorm() /
                  static_cast<double>(sp.test.size());
          } else if (family == Family::logistic) {
            const Eigen::VectorXd& Y = std::get<Eigen::VectorXd>(y);
            const GlmFit fit = fit_logistic(X_train, entries(Y, sp.train), L, lambda, glm);
            glm.init_alpha = fit.alpha_hat;
            glm.init_beta = fit.beta_hat;
            const Eigen::VectorXd a = held_out_alpha(fit.alpha_hat, blocks, rep.gamma);
            err = logistic_deviance(entries(Y, sp.test), logistic_predict_prob(fit, X_test, a));
          } else {
            const SurvivalData& s = std::get<SurvivalData>(y);
            const GlmFit fit = fit_cox(X_train, s.subset(sp.train), L, lambda, glm);
            glm.init_alpha = fit.alpha_hat;
            glm.init_beta = fit.beta_hat;
            err = -ppl_metric(fit, X, s, sp.train, sp.test, g);
          }
          rep.fold_errors(i, static_cast<Eigen::Index>(f)) = err;
        }
      },
      opts.threads);

  rep.mean_error = rep.fold_errors.rowwise().mean();
  rep.standard_error.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double var = (rep.fold_errors.row(i).array() - rep.mean_error[i]).square().sum() / (opts.k - 1);
    rep.standard_error[i] = std::sqrt(var / opts.k);
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < m; ++i)
    if (rep.mean_error[i] <= rep.mean_error[best]) best = i;
  rep.selected_lambda = lambda_grid[static_cast<std::size_t>(best)];
  return rep;
}

double mspe(const Eigen::VectorXd& prediction, const Eigen::VectorXd& truth_mean) {
  if (prediction.size() != truth_mean.size() || prediction.size() == 0)
    throw InvalidInput("mspe: vectors must be nonempty and of equal length");
  return (prediction - truth_mean).squaredNorm() / static_cast<double>(prediction.size());
}

double mspe(const FitCore& fit, const Eigen::MatrixXd& X, const Eigen::VectorXd& truth_mean) {
  return mspe(fit.linear_predictor(X), truth_mean);
}

double relative_improvement(double err_model, double err_baseline) {
  if (!(err_baseline > 0.0)) throw InvalidInput("relative_improvement: baseline error must be positive");
  return 1.0 - err_model / err_baseline;
}

namespace {

bool is_constant(const Eigen::VectorXd& c) {
  const double mean = c.mean();
  const double sd = std::sqrt((c.array() - mean).square().mean());
  return !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
}

double ols_rss(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  Eigen::MatrixXd D(design.rows(), design.cols() + 1);
  D << Eigen::VectorXd::Ones(design.rows()), design;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  return (y - D * qr.solve(y)).squaredNorm();
}

}  // namespace

ForwardSelection forward_selection(const Eigen::MatrixXd& X_pool, const Response& y, Family family,
                                   int max_steps) {
  if (X_pool.cols() == 0) throw InvalidInput("forward_selection: empty pool");
  if (family == Family::logistic)
    throw InvalidInput("forward_selection supports the linear and cox families");
  const bool is_cox = family == Family::cox;
  if (is_cox != std::holds_alternative<SurvivalData>(y))
    throw InvalidInput("forward_selection: response type does not match the family");
  const Eigen::Index n = X_pool.rows();
  if (!is_cox && std::get<Eigen::VectorXd>(y).size() != n)
    throw InvalidInput("forward_selection: response length does not match the pool");
  if (is_cox) {
    std::get<SurvivalData>(y).validate();
    if (std::get<SurvivalData>(y).size() != n)
      throw InvalidInput("forward_selection: survival data length does not match the pool");
  }

  ForwardSelection out;
  std::vector<int> candidates;
  Eigen::MatrixXd Z(n, X_pool.cols());  // standardized columns
  for (Eigen::Index j = 0; j < X_pool.cols(); ++j) {
    const Eigen::VectorXd c = X_pool.col(j);
    if (is_constant(c)) {
      out.skipped.push_back(static_cast<int>(j));
      std::cerr << "warning: forward_selection skips constant column " << j << "\n";
      continue;
    }
    const double mean = c.mean();
    Z.col(j) = (c.array() - mean) / std::sqrt((c.array() - mean).square().mean());
    candidates.push_back(static_cast<int>(j));
  }
  const int steps = max_steps < 0 ? static_cast<int>(candidates.size())
                                  : std::min<int>(max_steps, static_cast<int>(candidates.size()));
  std::vector<int> chosen;
  for (int step = 0; step < steps; ++step) {
    int best = -1;
    double best_score = 0.0;
    for (int j : candidates) {
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
      Eigen::MatrixXd D(n, static_cast<Eigen::Index>(chosen.size()) + 1);
      for (std::size_t c = 0; c < chosen.size(); ++c) D.col(static_cast<Eigen::Index>(c)) = Z.col(chosen[c]);
      D.col(D.cols() - 1) = Z.col(j);
      double score;
      if (is_cox) {
        try {
          score = -cox_regression(D, std::get<SurvivalData>(y)).loglik;
        } catch (const ModelFailure&) {
          continue;
        }
      } else {
        score = ols_rss(D, std::get<Eigen::VectorXd>(y));
      }
      if (best < 0 || score < best_score) {
        best = j;
        best_score = score;
      }
    }
    if (best < 0) break;
    chosen.push_back(best);
    out.order.push_back(best);
    out.criterion.push_back(is_cox ? -best_score : best_score);
  }
  return out;
}

Eigen::VectorXd univariate_cox_pvalues(const Eigen::MatrixXd& X, const SurvivalData& surv) {
  Eigen::VectorXd p(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const Eigen::VectorXd c = X.col(j);
    if (is_constant(c)) {
      p[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const CoxRegression reg = cox_regression(c, surv);
    const double z = reg.beta[0] * std::sqrt(reg.information(0, 0));
    p[j] = std::erfc(std::abs(z) / std::sqrt(2.0));
  }
  return p;
}

}  // namespace netcoh
