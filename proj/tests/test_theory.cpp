#include <doctest.h>

#include <cmath>

#include "netcoh/errors.hpp"
#include "netcoh/rnc_linear.hpp"
#include "netcoh/theory.hpp"
#include "support.hpp"

using namespace netcoh;
using testing_support::Rng;

namespace {

struct Instance {
  Graph g;
  Eigen::MatrixXd X;
  Eigen::VectorXd alpha, beta;
};

Instance make_instance(Rng& rng, int n, int p, bool connected) {
  Instance in;
  in.g = connected ? testing_support::connected_graph(n, 0.1, rng, true) : testing_support::random_graph(n, 0.15, rng);
  in.X = testing_support::standardized(testing_support::gaussian_matrix(n, p, rng));
  in.alpha = testing_support::gaussian_vector(n, rng, 0.5, 1.0);
  in.beta = testing_support::gaussian_vector(p, rng, 1.0, 1.0);
  return in;
}

}  // namespace

TEST_CASE("nu lies in [0, 1] and detects non-existence") {
  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const Instance in = make_instance(rng, 30, 1 + rep % 3, rep % 2 == 0);
    const double nu = assumption_nu(in.X, laplacian(in.g), 0.05 * (rep + 1));
    CHECK(nu >= 0.0);
    CHECK(nu <= 1.0 + 1e-12);
    if (rep % 2 == 0) CHECK(nu > 0.0);
  }
  const Instance in = make_instance(rng, 20, 2, true);
  CHECK(assumption_nu(in.X, laplacian(Graph(20)), 1.0) == 0.0);
  CHECK_THROWS_AS(theorem1_bounds(in.X, laplacian(Graph(20)), 1.0, in.alpha, 1.0), EstimatorDoesNotExist);
  CHECK_THROWS_AS(assumption_nu(in.X.array() + 1.0, laplacian(in.g), 1.0), InvalidInput);
  // nu is the smallest eigenvalue, so it bounds the Rayleigh quotient of any vector.
  const Eigen::MatrixXd P = in.X * (in.X.transpose() * in.X).inverse() * in.X.transpose();
  const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(20, 20) - P + 0.3 * testing_support::dense_laplacian(in.g);
  const double nu = assumption_nu(in.X, laplacian(in.g), 0.3);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd u = testing_support::gaussian_vector(20, rng);
    CHECK(u.dot(S * u) / u.squaredNorm() >= nu - 1e-12);
  }
}

TEST_CASE("bias forms agree and vanish for network-constant effects") {
  Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const Instance in = make_instance(rng, 25 + rep, 2, true);
    const BiasReport b = rnc_bias(in.X, laplacian(in.g), 0.4, in.alpha, in.beta);
    CHECK(b.form_gap < 1e-10);
    CHECK(b.bias.norm() > 0.0);
  }
  const Instance in = make_instance(rng, 30, 2, true);
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(30, 2.5);
  CHECK(rnc_bias(in.X, laplacian(in.g), 1.0, flat, in.beta).bias.norm() < 1e-10);
  const ExactMse zero = rnc_exact_mse(in.X, laplacian(in.g), 1.0, flat, in.beta, 0.0);
  CHECK(zero.mse_alpha() < 1e-18);
  CHECK(zero.mse_beta() < 1e-18);
  CHECK(zero.pred_error() < 1e-18);
}

TEST_CASE("exact errors never exceed the bounds") {
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const Instance in = make_instance(rng, 20 + rep, 1 + rep % 3, rep % 3 != 0);
    const double lambda = std::pow(10.0, -2.0 + 0.12 * rep);
    const double sigma2 = 0.1 + 0.1 * (rep % 5);
    const LaplacianMatrix L = laplacian(in.g, rep % 3 == 0 ? 0.05 : 0.0);
    const ExactMse e = rnc_exact_mse(in.X, L, lambda, in.alpha, in.beta, sigma2);
    const MseBounds b = theorem1_bounds(in.X, L, lambda, in.alpha, sigma2);
    CHECK(e.mse_alpha() <= b.alpha * (1 + 1e-12));
    CHECK(e.mse_beta() <= b.beta * (1 + 1e-12));
    CHECK(e.pred_error() <= b.pred * (1 + 1e-12));
  }
}

TEST_CASE("exact errors match Monte Carlo over noise draws") {
  Rng rng(4);
  const int n = 30, p = 2, reps = 3000;
  const Instance in = make_instance(rng, n, p, true);
  const double lambda = 0.5, sigma = 0.7;
  const LaplacianMatrix L = laplacian(in.g);
  const ExactMse e = rnc_exact_mse(in.X, L, lambda, in.alpha, in.beta, sigma * sigma);
  const ExactMse o = ols_exact_mse(in.X, in.alpha, sigma * sigma);
  const BiasReport b = rnc_bias(in.X, L, lambda, in.alpha, in.beta);
  const Eigen::VectorXd dir = b.bias / b.bias.norm();
  const Eigen::VectorXd mean = in.alpha + in.X * in.beta;

  Eigen::MatrixXd samples(reps, 5);  // mse_alpha, mse_beta, pred, bias projection, ols mse_alpha
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd Y = mean + testing_support::gaussian_vector(n, rng, 0.0, sigma);
    const LinearFit fit = fit_linear(in.X, Y, L, lambda);
    Eigen::VectorXd err(n + p);
    err << fit.alpha_hat - in.alpha, fit.beta_hat - in.beta;
    samples(r, 0) = err.head(n).squaredNorm();
    samples(r, 1) = err.tail(p).squaredNorm();
    samples(r, 2) = (fitted_values(fit, in.X) - mean).squaredNorm();
    samples(r, 3) = dir.dot(err);
    samples(r, 4) = (Eigen::VectorXd::Constant(n, Y.mean()) - in.alpha).squaredNorm();
  }
  const Eigen::RowVectorXd avg = samples.colwise().mean();
  const Eigen::RowVectorXd se =
      ((samples.rowwise() - avg).array().square().colwise().sum() / (reps - 1)).sqrt() / std::sqrt(double(reps));
  const double expected[5] = {e.mse_alpha(), e.mse_beta(), e.pred_error(), b.bias.norm(), o.mse_alpha()};
  for (int k = 0; k < 5; ++k) CHECK(std::abs(avg[k] - expected[k]) <= 3.0 * se[k]);
}

TEST_CASE("ols exact errors") {
  Rng rng(5);
  const Instance in = make_instance(rng, 40, 2, true);
  const ExactMse z = ols_exact_mse(in.X, Eigen::VectorXd::Constant(40, 1.3), 0.0);
  CHECK(z.mse_alpha() < 1e-20);
  CHECK(z.mse_beta() < 1e-20);
  CHECK(z.pred_error() < 1e-20);
  const ExactMse e = ols_exact_mse(in.X, in.alpha, 0.25);
  CHECK(e.var_alpha == doctest::Approx(0.25));
  CHECK(e.var_pred == doctest::Approx(0.25 * 3));
  Eigen::MatrixXd collinear(40, 2);
  collinear << in.X.col(0), 2.0 * in.X.col(0);
  CHECK_THROWS_AS(ols_exact_mse(collinear, in.alpha, 1.0), InvalidInput);
}

TEST_CASE("bias grows and variance shrinks with lambda") {
  Rng rng(6);
  const Instance in = make_instance(rng, 40, 2, true);
  const LaplacianMatrix L = laplacian(in.g);
  double last_bias = -1.0, last_var = INFINITY;
  for (double lambda : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0}) {
    const ExactMse e = rnc_exact_mse(in.X, L, lambda, in.alpha, in.beta, 0.25);
    CHECK(e.bias_sq_alpha > last_bias);
    CHECK(e.var_alpha < last_var);
    last_bias = e.bias_sq_alpha;
    last_var = e.var_alpha;
  }
}

TEST_CASE("comparison inequalities") {
  TheoryReport r;
  r.n = 300;
  r.p = 2;
  r.lambda = 0.1;
  r.nu = 0.5;
  r.mu = 300.0;
  r.l_alpha_sq = 105.0;
  r.v_alpha = 203.0;
  r.ols_coef_sq = 406.0 / (300.0 * 300.0);
  r.trace_inv_gram = 2.0 / 300.0;
  const OlsComparison c = ols_comparison(r, 0.25);
  CHECK(c.sigma_threshold_alpha == doctest::Approx(std::sqrt((203.0 - 0.04 * 105.0) / 599.0)));
  CHECK(c.sigma_threshold_alpha == doctest::Approx(0.576).epsilon(1e-3));
  CHECK(c.alpha_favored);
  CHECK(c.sigma_threshold_beta == doctest::Approx(0.2754).epsilon(1e-3));
  CHECK_FALSE(ols_comparison(r, 100.0).alpha_favored);
  CHECK(ols_comparison(r, 1e-12).alpha_favored);
  CHECK(ols_comparison(r, 1e-12).beta_favored);
  r.nu = 0.0;
  CHECK_THROWS_AS(ols_comparison(r, 1.0), InvalidInput);
}

TEST_CASE("sparsification bound") {
  Rng rng(7);
  const int n = 40, p = 2;
  const Instance in = make_instance(rng, n, p, true);
  const Eigen::VectorXd Y = in.alpha + in.X * in.beta + testing_support::gaussian_vector(n, rng, 0.0, 0.5);
  const double lambda = 0.7;
  const LaplacianMatrix L = laplacian(in.g);
  const LinearFit fit = fit_linear(in.X, Y, L, lambda);
  const double m = linear_strong_convexity(in.X, L, lambda);
  CHECK(m > 0.0);

  const SparsificationBound same =
      sparsification_bound(fit.alpha_hat, fit.beta_hat, fit.alpha_hat, fit.beta_hat, L, L, lambda, 0.1, m);
  CHECK(same.observed_sq_diff == 0.0);
  CHECK(same.a == doctest::Approx(same.b));

  for (double eps : {0.05, 0.2, 0.4}) {
    // Perturb every edge weight within [1 - eps, 1 + eps]: a valid eps-approximation.
    std::vector<Edge> edges = in.g.edges();
    std::uniform_real_distribution<double> u(1.0 - eps, 1.0 + eps);
    for (Edge& e : edges) e.w *= u(rng);
    const LaplacianMatrix Ls = laplacian(from_edge_list(edges, n));
    const LinearFit star = fit_linear(in.X, Y, Ls, lambda);
    const double m_both = std::min(m, linear_strong_convexity(in.X, Ls, lambda));
    const SparsificationBound s =
        sparsification_bound(fit.alpha_hat, fit.beta_hat, star.alpha_hat, star.beta_hat, L, Ls, lambda, eps, m_both);
    CHECK(s.observed_sq_diff > 0.0);
    CHECK(s.observed_sq_diff <= s.bound);
    CHECK(s.bound_essential == doctest::Approx(4.0 * eps * lambda * s.a / m_both));
  }
  CHECK_THROWS_AS(sparsification_bound(fit.alpha_hat, fit.beta_hat, fit.alpha_hat, fit.beta_hat, L, L, lambda, 0.5, m),
                  InvalidInput);
}
