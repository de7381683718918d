// Whole-pipeline runs: generate, tune, fit, predict and score, as a user would.

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "netcoh/model_selection.hpp"
#include "netcoh/rnc_glm.hpp"
#include "netcoh/rnc_linear.hpp"
#include "netcoh/simulate.hpp"
#include "netcoh/sparsify.hpp"
#include "support.hpp"

using namespace netcoh;
namespace ts = testing_support;

namespace {

struct Split {
  std::vector<NodeId> train, test;
};

Split random_split(int n, double test_fraction, std::uint64_t seed) {
  std::vector<NodeId> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto cut = ids.begin() + static_cast<std::ptrdiff_t>(n * (1.0 - test_fraction));
  Split s{{ids.begin(), cut}, {cut, ids.end()}};
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Eigen::MatrixXd rows(const Eigen::MatrixXd& X, const std::vector<NodeId>& ids) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), X.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(ids[i]);
  return out;
}

Eigen::VectorXd entries(const Eigen::VectorXd& v, const std::vector<NodeId>& ids) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[ids[i]];
  return out;
}

// Training effects first, test effects predicted from the full network.
Eigen::VectorXd predicted_test_effects(const FitCore& fit, const Graph& g, const Split& s, double gamma) {
  const LaplacianBlocks blocks = split_for_prediction(g, s.test);
  REQUIRE(blocks.train_ids == s.train);
  return predict_new_nodes(fit.alpha_hat, blocks, gamma);
}

}  // namespace

TEST_CASE("linear pipeline: tuned RNC predicts held-out nodes better than OLS") {
  SimConfig cfg;
  cfg.n = 240;
  const GraphDraw draw = sbm_generate(cfg, 31);
  const SimData d = gen_data(cfg, draw.labels, 32);
  const Eigen::VectorXd& Y = std::get<Eigen::VectorXd>(d.y);
  const Split s = random_split(cfg.n, 0.2, 33);
  const Graph g_train = draw.graph.induced_subgraph(s.train);
  const Eigen::MatrixXd X_train = rows(d.X, s.train), X_test = rows(d.X, s.test);

  CvOptions opts;
  opts.k = 5;
  const CVReport cv = kfold_cv(X_train, Response(entries(Y, s.train)), g_train, log_grid(0.01, 10, 7),
                               Family::linear, opts);
  const LinearFit fit = fit_linear(X_train, entries(Y, s.train), g_train, cv.selected_lambda);
  const Eigen::VectorXd alpha_test = predicted_test_effects(fit, draw.graph, s, 0.0);
  const Eigen::VectorXd rnc_pred = fit.linear_predictor(X_test, alpha_test);
  const LinearFit ols = ols_fit(X_train, entries(Y, s.train));
  const Eigen::VectorXd ols_pred =
      ols.linear_predictor(X_test, Eigen::VectorXd::Constant(X_test.rows(), ols.alpha_hat[0]));
  const Eigen::VectorXd truth = entries(d.mean, s.test);
  const double rnc_err = mspe(rnc_pred, truth), ols_err = mspe(ols_pred, truth);
  MESSAGE("held-out MSPE rnc " << rnc_err << " ols " << ols_err << " lambda " << cv.selected_lambda);
  CHECK(rnc_err < 0.7 * ols_err);
}

TEST_CASE("cox pipeline: network effects raise the predictive partial likelihood") {
  SimConfig cfg;
  cfg.family = Family::cox;
  cfg.n = 300;
  cfg.s = 0.1;
  double rnc_total = 0.0, plain_total = 0.0;
  int rnc_wins = 0;
  const int splits = 5;
  const GraphDraw draw = sbm_generate(cfg, 41);
  const SimData d = gen_data(cfg, draw.labels, 42);
  const SurvivalData& surv = std::get<SurvivalData>(d.y);
  for (int k = 0; k < splits; ++k) {
    const Split s = random_split(cfg.n, 0.2, 43 + static_cast<std::uint64_t>(k));
    const Graph g_train = draw.graph.induced_subgraph(s.train);
    const Eigen::MatrixXd X_train = rows(d.X, s.train);
    const GlmFit rnc = fit_cox(X_train, surv.subset(s.train), g_train, 0.05, 0.1);
    const GlmFit plain = fit_plain_cox(X_train, surv.subset(s.train));
    const double a = ppl_metric(rnc, d.X, surv, s.train, s.test, draw.graph);
    const double b = ppl_metric(plain, d.X, surv, s.train, s.test, draw.graph);
    rnc_total += a;
    plain_total += b;
    rnc_wins += a > b ? 1 : 0;
  }
  MESSAGE("mean PPL rnc " << rnc_total / splits << " plain " << plain_total / splits);
  CHECK(rnc_total > plain_total);
  CHECK(rnc_wins >= 4);
}

TEST_CASE("forward selection then RNC: the informative covariates enter first") {
  std::mt19937_64 rng(51);
  const int n = 200, pool = 8;
  const Eigen::MatrixXd X = ts::gaussian_matrix(n, pool, rng);
  const Graph g = ts::connected_graph(n, 0.03, rng);
  Eigen::VectorXd alpha(n);
  for (int i = 0; i < n; ++i) alpha[i] = i < n / 2 ? 0.5 : -0.5;
  const Eigen::VectorXd Y = alpha + 2.0 * X.col(5) - 1.5 * X.col(2) + ts::gaussian_vector(n, rng, 0.0, 0.5);
  const ForwardSelection fs = forward_selection(X, Response(Y), Family::linear, 3);
  REQUIRE(fs.order.size() == 3);
  CHECK(fs.order[0] == 5);
  CHECK(fs.order[1] == 2);

  Eigen::MatrixXd chosen(n, 2);
  chosen << X.col(fs.order[0]), X.col(fs.order[1]);
  const LinearFit fit = fit_linear(chosen, Y, g, 0.5);
  const Eigen::VectorXd beta = fit.beta_hat.cwiseQuotient(fit.standardization.scale);
  CHECK(beta[0] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(beta[1] == doctest::Approx(-1.5).epsilon(0.1));
}

TEST_CASE("sparsified dense graph gives nearly the same fit") {
  const Graph dense = dense_block_graph(40, 3, 1.0, 0.1);
  std::mt19937_64 rng(61);
  const int n = dense.node_count();
  const Eigen::MatrixXd X = ts::gaussian_matrix(n, 2, rng);
  Eigen::VectorXd alpha(n);
  for (int i = 0; i < n; ++i) alpha[i] = (i / 40) - 1.0;
  const Eigen::VectorXd Y = alpha + X.col(0) + ts::gaussian_vector(n, rng, 0.0, 0.5);
  SparsifyOptions opts;
  opts.verify = true;
  const SparsifyResult sp = spectral_sparsify(dense, 0.2, 62, opts);
  REQUIRE(sp.certificate.verified);
  const LinearFit a = fit_linear(X, Y, dense, 0.01);
  const LinearFit b = fit_linear(X, Y, sp.graph_star, 0.01);
  CHECK((a.alpha_hat - b.alpha_hat).norm() < 0.1 * a.alpha_hat.norm());
  CHECK((a.beta_hat - b.beta_hat).norm() < 0.05);
}

TEST_CASE("property: relabelling nodes permutes the GLM fits") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 40 + 10 * trial, p = 2;
    const Graph g = ts::random_graph(n, 0.1, rng, true);
    const Eigen::MatrixXd X = ts::gaussian_matrix(n, p, rng);
    const Eigen::VectorXd y = ts::random_binary(X.col(0), rng);
    const SurvivalData surv = ts::random_survival(n, rng, false);

    std::vector<NodeId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    // Node i of the relabelled problem is node perm[i] of the original.
    std::vector<int> inverse(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) inverse[perm[i]] = i;
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) edges.push_back({inverse[e.u], inverse[e.v], e.w});
    const Graph gp = from_edge_list(edges, n);
    const Eigen::MatrixXd Xp = rows(X, perm);
    const SurvivalData sp = surv.subset(perm);

    const GlmFit a = fit_logistic(X, y, g, 0.5, 0.05);
    const GlmFit b = fit_logistic(Xp, entries(y, perm), gp, 0.5, 0.05);
    CHECK((entries(a.alpha_hat, perm) - b.alpha_hat).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.beta_hat - b.beta_hat).cwiseAbs().maxCoeff() < 1e-6);

    const GlmFit c = fit_cox(X, surv, g, 0.5, 0.1);
    const GlmFit e = fit_cox(Xp, sp, gp, 0.5, 0.1);
    CHECK((entries(c.alpha_hat, perm) - e.alpha_hat).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((c.beta_hat - e.beta_hat).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("property: heavier smoothing pulls logistic effects together") {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 60;
    const Graph g = ts::connected_graph(n, 0.08, rng);
    const Eigen::MatrixXd X = ts::gaussian_matrix(n, 1, rng);
    Eigen::VectorXd eta = ts::gaussian_vector(n, rng, 0.0, 1.5);
    const Eigen::VectorXd y = ts::random_binary(eta, rng);
    const LaplacianMatrix L = laplacian(g);
    double previous = INFINITY;
    for (double lambda : {0.05, 0.5, 5.0, 50.0}) {
      const GlmFit fit = fit_logistic(X, y, g, lambda, 0.01);
      const double roughness = cohesion_penalty(L, fit.alpha_hat);
      CHECK(roughness < previous);
      previous = roughness;
    }
  }
}
