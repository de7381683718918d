#include "netcoh/sparsify.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "netcoh/errors.hpp"
#include "netcoh/parallel.hpp"
#include "netcoh/sdd_solver.hpp"

namespace netcoh {
namespace {

constexpr int kDenseComponentLimit = 3000;
constexpr int kDenseVerifyLimit = 5000;

// Dense pseudoinverse of a connected component's Laplacian:
// (L + J/n)^{-1} - J/n.
Eigen::MatrixXd component_pinv(const Graph& sub) {
  const int m = sub.node_count();
  Eigen::MatrixXd A = laplacian(sub).dense();
  A.array() += 1.0 / m;
  Eigen::MatrixXd P = A.llt().solve(Eigen::MatrixXd::Identity(m, m));
  P.array() -= 1.0 / m;
  return P;
}

double resistance_by_pcg(const SparseMatrix& L, int u, int v) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(L.rows());
  b[u] = 1.0;
  b[v] = -1.0;
  PcgOptions opts;
  opts.tol = 1e-12;
  // A bare Laplacian is singular but b is orthogonal to its kernel, so CG
  // stays in the range.
  const auto [x, rep] = pcg_solve(L, b, opts);
  return x[u] - x[v];
}

}  // namespace

Eigen::VectorXd effective_resistances(const Graph& g) {
  const auto& edges = g.edges();
  Eigen::VectorXd R(static_cast<Eigen::Index>(edges.size()));
  if (edges.empty()) return R;

  const Components comps = connected_components(g);
  const auto members = comps.members();
  std::vector<int> local(g.node_count(), 0);
  for (const auto& ids : members)
    for (std::size_t i = 0; i < ids.size(); ++i) local[ids[i]] = static_cast<int>(i);

  std::vector<std::vector<std::size_t>> edges_of(comps.count);
  for (std::size_t e = 0; e < edges.size(); ++e) edges_of[comps.label[edges[e].u]].push_back(e);

  parallel_for(members.size(), [&](std::size_t c) {
    if (edges_of[c].empty()) return;
    const Graph sub = g.induced_subgraph(members[c]);
    if (sub.node_count() <= kDenseComponentLimit) {
      const Eigen::MatrixXd P = component_pinv(sub);
      for (std::size_t e : edges_of[c]) {
        const int a = local[edges[e].u], b = local[edges[e].v];
        R[e] = P(a, a) + P(b, b) - 2.0 * P(a, b);
      }
    } else {
      const SparseMatrix L = laplacian(sub).matrix();
      for (std::size_t e : edges_of[c])
        R[e] = resistance_by_pcg(L, local[edges[e].u], local[edges[e].v]);
    }
  });
  return R;
}

SpectralCertificate verify_spectral_approx(const LaplacianMatrix& L, const LaplacianMatrix& L_star,
                                           double epsilon) {
  if (L.dim() != L_star.dim())
    throw InvalidInput("verify_spectral_approx: dimensions differ (" + std::to_string(L.dim()) +
                       " vs " + std::to_string(L_star.dim()) + ")");
  if (L.dim() > kDenseVerifyLimit)
    throw InvalidInput("verify_spectral_approx: dense check limited to n <= 5000");
  SpectralCertificate cert;
  cert.computed = true;
  const int n = L.dim();
  if (n == 0) {
    cert.verified = true;
    return cert;
  }
  Eigen::MatrixXd A = L.dense(), B = L_star.dense();
  A.diagonal().array() += L.ridge();
  B.diagonal().array() += L_star.ridge();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double tol = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  int r0 = 0;
  while (r0 < n && ev[r0] <= tol) ++r0;
  const Eigen::MatrixXd& U = es.eigenvectors();

  if (r0 > 0) {
    const double leak = (B * U.leftCols(r0)).norm();
    if (leak > 1e-8 * std::max(1.0, B.norm())) {
      cert.measured_epsilon = std::numeric_limits<double>::infinity();
      return cert;
    }
  }
  if (r0 == n) {
    cert.verified = true;
    return cert;
  }
  const Eigen::MatrixXd Ur = U.rightCols(n - r0);
  const Eigen::VectorXd s = ev.tail(n - r0).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd T = s.asDiagonal() * (Ur.transpose() * B * Ur) * s.asDiagonal();
  const Eigen::VectorXd mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues();
  cert.measured_epsilon = std::max(std::abs(mu[0] - 1.0), std::abs(mu[mu.size() - 1] - 1.0));
  cert.verified = cert.measured_epsilon <= epsilon;
  return cert;
}

SparsifyResult spectral_sparsify(const Graph& g, double epsilon, std::uint64_t seed,
                                 const SparsifyOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw InvalidInput("spectral_sparsify: epsilon must lie in (0, 1/2)");
  if (!(opts.oversampling > 0.0) || !std::isfinite(opts.oversampling))
    throw InvalidInput("spectral_sparsify: oversampling constant must be positive");

  SparsifyResult out;
  out.epsilon_target = epsilon;
  const int n = g.node_count();
  const auto& edges = g.edges();
  if (edges.empty() || n < 2) {
    out.graph_star = g;
    out.edges_kept = edges.size();
    if (opts.verify) out.certificate = verify_spectral_approx(laplacian(g), laplacian(g), epsilon);
    return out;
  }

  const Eigen::VectorXd R = effective_resistances(g);
  std::vector<double> mass(edges.size());
  double total = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    mass[e] = edges[e].w * R[e];
    total += mass[e];
  }
  const double q = std::ceil(opts.oversampling * n * std::log(double(n)) / (epsilon * epsilon));
  out.samples = static_cast<std::size_t>(q);

  // Multinomial draw of q samples as a chain of conditional binomials.
  std::mt19937_64 rng(seed);
  std::vector<Edge> kept;
  long long remaining = static_cast<long long>(q);
  double remaining_mass = total;
  for (std::size_t e = 0; e < edges.size() && remaining > 0; ++e) {
    const double pe = mass[e] / total;
    const double cond = std::min(1.0, mass[e] / remaining_mass);
    long long count = remaining;
    if (cond < 1.0) count = std::binomial_distribution<long long>(remaining, cond)(rng);
    remaining -= count;
    remaining_mass -= mass[e];
    if (count == 0) continue;
    kept.push_back({edges[e].u, edges[e].v, edges[e].w * double(count) / (q * pe)});
  }
  out.graph_star = from_edge_list(kept, n);
  out.edges_kept = kept.size();
  if (opts.verify) out.certificate = verify_spectral_approx(laplacian(g), laplacian(out.graph_star), epsilon);
  return out;
}

}  // namespace netcoh
