#include <doctest.h>

#include <cmath>

#include "netcoh/errors.hpp"
#include "netcoh/sparsify.hpp"
#include "support.hpp"

using namespace netcoh;
using testing_support::Rng;

namespace {

Graph complete_graph(int n, double w = 1.0) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v, w});
  return from_edge_list(edges, n);
}

// Independent oracle: Moore-Penrose inverse from the full eigendecomposition.
Eigen::VectorXd resistances_by_eigen(const Graph& g) {
  const Eigen::MatrixXd L = testing_support::dense_laplacian(g, 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  Eigen::VectorXd inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = inv[i] > 1e-9 ? 1.0 / inv[i] : 0.0;
  const Eigen::MatrixXd P = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd R(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& x = g.edges()[e];
    R[e] = P(x.u, x.u) + P(x.v, x.v) - 2 * P(x.u, x.v);
  }
  return R;
}

}  // namespace

TEST_CASE("effective resistance of known graphs") {
  const Eigen::VectorXd Rk = effective_resistances(complete_graph(12));
  CHECK((Rk.array() - 2.0 / 12).abs().maxCoeff() < 1e-12);

  // A tree edge carries all current between its endpoints: R = 1/w.
  std::vector<Edge> tree = {{0, 1, 2.0}, {1, 2, 0.5}, {1, 3, 4.0}, {3, 4, 1.0}};
  const Eigen::VectorXd Rt = effective_resistances(from_edge_list(tree, 5));
  for (std::size_t e = 0; e < tree.size(); ++e) CHECK(Rt[e] == doctest::Approx(1.0 / tree[e].w));

  // Cycle of length k: R = (k - 1) / k.
  std::vector<Edge> cycle;
  for (int i = 0; i < 6; ++i) cycle.push_back({i, (i + 1) % 6, 1.0});
  const Eigen::VectorXd Rc = effective_resistances(from_edge_list(cycle, 6));
  CHECK((Rc.array() - 5.0 / 6).abs().maxCoeff() < 1e-12);

  CHECK(effective_resistances(Graph(4)).size() == 0);
}

TEST_CASE("effective resistances match an eigendecomposition oracle on random graphs") {
  Rng rng(11);
  for (int rep = 0; rep < 15; ++rep) {
    const Graph g = testing_support::random_graph(10 + 3 * rep, 0.2, rng, true);
    const Eigen::VectorXd R = effective_resistances(g);
    const Eigen::VectorXd O = resistances_by_eigen(g);
    CHECK((R - O).cwiseAbs().maxCoeff() < 1e-9);
    // Foster's theorem: sum of w R over edges is n minus the number of components.
    double foster = 0.0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) foster += g.edges()[e].w * R[e];
    CHECK(foster == doctest::Approx(g.node_count() - connected_components(g).count));
  }
}

TEST_CASE("spectral certificate") {
  Rng rng(12);
  const Graph g = testing_support::connected_graph(30, 0.2, rng, true);
  const LaplacianMatrix L = laplacian(g);
  std::vector<Edge> scaled = g.edges();
  for (Edge& e : scaled) e.w *= 1.2;
  const SpectralCertificate c = verify_spectral_approx(L, laplacian(from_edge_list(scaled, 30)), 0.25);
  CHECK(c.computed);
  CHECK(c.verified);
  CHECK(c.measured_epsilon == doctest::Approx(0.2));
  CHECK_FALSE(verify_spectral_approx(L, laplacian(from_edge_list(scaled, 30)), 0.1).verified);
  CHECK(verify_spectral_approx(L, L, 0.01).measured_epsilon < 1e-10);

  // An edge joining two components of L acts on its null space.
  std::vector<Edge> two = {{0, 1, 1.0}, {2, 3, 1.0}};
  std::vector<Edge> bridged = {{0, 1, 1.0}, {2, 3, 1.0}, {1, 2, 0.1}};
  const SpectralCertificate leak =
      verify_spectral_approx(laplacian(from_edge_list(two, 4)), laplacian(from_edge_list(bridged, 4)), 0.4);
  CHECK(std::isinf(leak.measured_epsilon));
  CHECK_FALSE(leak.verified);

  CHECK_THROWS_AS(verify_spectral_approx(L, laplacian(Graph(29)), 0.1), InvalidInput);
}

TEST_CASE("sparsifier output is a valid reweighted subgraph") {
  Rng rng(13);
  const Graph g = complete_graph(60);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SparsifyOptions opts;
    opts.oversampling = 0.5;
    opts.verify = true;
    const SparsifyResult s = spectral_sparsify(g, 0.3, seed, opts);
    CHECK(s.edges_kept == s.graph_star.edge_count());
    CHECK(s.edges_kept < g.edge_count());
    CHECK(s.samples == std::size_t(std::ceil(0.5 * 60 * std::log(60.0) / 0.09)));
    CHECK(s.graph_star.node_count() == 60);
    for (const Edge& e : s.graph_star.edges()) CHECK(e.w > 0.0);
    // Total weight is preserved in expectation; with q samples it is close.
    CHECK(s.graph_star.total_weight() == doctest::Approx(g.total_weight()).epsilon(0.2));
    CHECK(s.certificate.computed);
    CHECK(std::isfinite(s.certificate.measured_epsilon));
    CHECK(connected_components(s.graph_star).count == 1);
  }
  // Deterministic per seed.
  const SparsifyResult a = spectral_sparsify(g, 0.3, 5), b = spectral_sparsify(g, 0.3, 5);
  REQUIRE(a.edges_kept == b.edges_kept);
  for (std::size_t e = 0; e < a.edges_kept; ++e) CHECK(a.graph_star.edges()[e].w == b.graph_star.edges()[e].w);
}

TEST_CASE("sparsifier meets its target with the default constant") {
  Rng rng(14);
  const Graph g = testing_support::connected_graph(80, 0.5, rng, true);
  SparsifyOptions opts;
  opts.verify = true;
  for (double eps : {0.2, 0.3, 0.45}) {
    const SparsifyResult s = spectral_sparsify(g, eps, 21, opts);
    CHECK(s.certificate.verified);
    CHECK(s.certificate.measured_epsilon <= eps);
  }
}

TEST_CASE("sparsifier handles components and rejects bad input") {
  std::vector<Edge> edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {4, 5, 3.0}};
  const Graph g = from_edge_list(edges, 7);  // nodes 3 and 6 isolated
  SparsifyOptions opts;
  opts.verify = true;
  const SparsifyResult s = spectral_sparsify(g, 0.4, 1, opts);
  CHECK(s.graph_star.node_count() == 7);
  CHECK(connected_components(s.graph_star).count == connected_components(g).count);
  CHECK(s.certificate.verified);

  const SparsifyResult empty = spectral_sparsify(Graph(5), 0.2, 1, opts);
  CHECK(empty.edges_kept == 0);
  CHECK(empty.certificate.verified);

  CHECK_THROWS_AS(spectral_sparsify(g, 0.5, 1), InvalidInput);
  CHECK_THROWS_AS(spectral_sparsify(g, 0.0, 1), InvalidInput);
  SparsifyOptions bad;
  bad.oversampling = -1.0;
  CHECK_THROWS_AS(spectral_sparsify(g, 0.2, 1, bad), InvalidInput);
}
