#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

#include "netcoh/graph.hpp"

namespace netcoh {

/// Effective resistance (e_u - e_v)' L^+ (e_u - e_v) of every edge, in
/// g.edges() order. Exact: dense pseudoinverse per connected component up to
/// 3000 nodes, conjugate-gradient solves per edge beyond that.
Eigen::VectorXd effective_resistances(const Graph& g);

struct SpectralCertificate {
  bool computed = false;
  bool verified = false;
  double measured_epsilon = 0.0;  // max |mu - 1| over generalized eigenvalues
};

/// Generalized eigenvalues of L* x = mu L x on the range of L. Dense, n <= 5000.
/// measured_epsilon is infinite when L* acts on the null space of L.
SpectralCertificate verify_spectral_approx(const LaplacianMatrix& L, const LaplacianMatrix& L_star,
                                           double epsilon);

struct SparsifyOptions {
  double oversampling = 9.0;  // C in q = ceil(C n ln n / eps^2)
  bool verify = false;
};

struct SparsifyResult {
  Graph graph_star;
  double epsilon_target = 0.0;
  std::size_t samples = 0;     // q
  std::size_t edges_kept = 0;
  SpectralCertificate certificate;
};

/// Samples q edges with replacement with probability proportional to
/// w_e R_e and reweights each kept edge by w_e * count / (q p_e).
/// Requires 0 < epsilon < 1/2. Deterministic for a given seed.
SparsifyResult spectral_sparsify(const Graph& g, double epsilon, std::uint64_t seed,
                                 const SparsifyOptions& opts = {});

}  // namespace netcoh
