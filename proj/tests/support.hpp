#pragma once

// Shared generators and dense reference computations for the test suites.
// Everything here is written directly against Eigen dense algebra so it does
// not share code paths with the library under test.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "netcoh/graph.hpp"
#include "netcoh/rnc_glm.hpp"

namespace testing_support {

using Rng = std::mt19937_64;

inline std::vector<netcoh::Edge> random_edges(int n, double p, Rng& rng, bool weighted = false) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> wdist(0.2, 2.0);
  std::vector<netcoh::Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v, weighted ? wdist(rng) : 1.0});
  return edges;
}

inline netcoh::Graph random_graph(int n, double p, Rng& rng, bool weighted = false) {
  const auto e = random_edges(n, p, rng, weighted);
  return netcoh::from_edge_list(e, n);
}

/// Connected graph: a random spanning path plus random extra edges.
inline netcoh::Graph connected_graph(int n, double p, Rng& rng, bool weighted = false) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> wdist(0.2, 2.0);
  std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
  std::vector<netcoh::Edge> edges;
  auto add = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    if (has[a][b]) return;
    has[a][b] = 1;
    edges.push_back({a, b, weighted ? wdist(rng) : 1.0});
  };
  for (int i = 0; i + 1 < n; ++i) add(perm[i], perm[i + 1]);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) add(u, v);
  return netcoh::from_edge_list(edges, n);
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) X(i, j) = z(rng);
  return X;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> z(mean, sd);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = z(rng);
  return v;
}

/// Columns centered and scaled to unit population variance.
inline Eigen::MatrixXd standardized(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd S = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    S.col(j).array() -= S.col(j).mean();
    S.col(j) /= std::sqrt(S.col(j).squaredNorm() / static_cast<double>(X.rows()));
  }
  return S;
}

/// D - A built entry by entry from the edge list.
inline Eigen::MatrixXd dense_laplacian(const netcoh::Graph& g, double gamma = 0.0) {
  const int n = g.node_count();
  Eigen::MatrixXd L = gamma * Eigen::MatrixXd::Identity(n, n);
  for (const auto& e : g.edges()) {
    L(e.u, e.u) += e.w;
    L(e.v, e.v) += e.w;
    L(e.u, e.v) -= e.w;
    L(e.v, e.u) -= e.w;
  }
  return L;
}

/// (I, X) and diag(L, 0).
inline Eigen::MatrixXd augmented(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Xt(X.rows(), X.rows() + X.cols());
  Xt << Eigen::MatrixXd::Identity(X.rows(), X.rows()), X;
  return Xt;
}

inline Eigen::MatrixXd penalty_block(const Eigen::MatrixXd& L, Eigen::Index p) {
  const Eigen::Index n = L.rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + p, n + p);
  M.topLeftCorner(n, n) = L;
  return M;
}

/// argmin |Y - alpha - X beta|^2 + lambda alpha' L alpha by a full-pivot LU of
/// the stacked normal equations (X used as given).
inline Eigen::VectorXd dense_rnc(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                 const Eigen::MatrixXd& L, double lambda) {
  const Eigen::MatrixXd Xt = augmented(X);
  const Eigen::MatrixXd A = Xt.transpose() * Xt + lambda * penalty_block(L, X.cols());
  return A.fullPivLu().solve(Xt.transpose() * Y);
}

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// Direct transcriptions of the objectives, one term at a time.
inline double logistic_objective_ref(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::MatrixXd& Lg,
                              double lambda, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double eta = alpha[i] + X.row(i).dot(beta);
    const double p = 1.0 / (1.0 + std::exp(-eta));
    ll += y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
  }
  return ll - lambda * alpha.dot(Lg * alpha);
}

inline double cox_loglik_ref(const Eigen::VectorXd& eta, const netcoh::SurvivalData& s) {
  double ll = 0.0;
  for (Eigen::Index v = 0; v < eta.size(); ++v) {
    if (!s.event[v]) continue;
    double risk = 0.0;
    for (Eigen::Index u = 0; u < eta.size(); ++u)
      if (s.time[u] >= s.time[v]) risk += std::exp(eta[u]);
    ll += eta[v] - std::log(risk);
  }
  return ll;
}

inline netcoh::SurvivalData random_survival(int n, Rng& rng, bool ties) {
  netcoh::SurvivalData s;
  s.time.resize(n);
  s.event.resize(n);
  std::exponential_distribution<double> t(1.0);
  std::bernoulli_distribution ev(0.7);
  for (int i = 0; i < n; ++i) {
    s.time[i] = ties ? std::ceil(5.0 * t(rng)) : t(rng) + 1e-3;
    s.event[i] = ev(rng) ? 1 : 0;
  }
  s.event[0] = 1;
  return s;
}

inline Eigen::VectorXd random_binary(const Eigen::VectorXd& eta, Rng& rng) {
  Eigen::VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    y[i] = std::bernoulli_distribution(1.0 / (1.0 + std::exp(-eta[i])))(rng) ? 1.0 : 0.0;
  return y;
}

template <class F>
inline Eigen::VectorXd central_difference(F f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}


}  // namespace testing_support
