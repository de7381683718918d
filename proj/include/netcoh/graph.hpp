#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <span>
#include <vector>

namespace netcoh {

using SparseMatrix = Eigen::SparseMatrix<double>;
using NodeId = int;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

/// Weighted undirected simple graph on nodes 0..n-1.
///
/// Edges are stored once with u < v. Weights are strictly positive; rows with
/// zero weight are dropped when the graph is built.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : n_(n), offsets_(static_cast<std::size_t>(n) + 1, 0) {}

  int node_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Weighted degree d_u = sum of incident weights.
  Eigen::VectorXd degrees() const;

  struct Neighbor {
    NodeId node;
    double w;
  };
  std::span<const Neighbor> neighbors(NodeId u) const {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }

  /// Subgraph on `ids`, relabelled so that ids[i] becomes node i.
  Graph induced_subgraph(std::span<const NodeId> ids) const;

  double total_weight() const;

 private:
  friend Graph from_edge_list(std::span<const Edge>, int);
  void build_adjacency();

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Builds a graph from undirected edge rows.
/// Throws InvalidInput on self-loops, ids outside [0, n), negative weights, or
/// the same unordered pair listed twice.
Graph from_edge_list(std::span<const Edge> rows, int n);

/// Sparse L + ridge*I where L = D - A. Immutable once built.
class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;
  LaplacianMatrix(SparseMatrix matrix, double ridge)
      : matrix_(std::move(matrix)), ridge_(ridge) {}

  int dim() const { return static_cast<int>(matrix_.rows()); }
  double ridge() const { return ridge_; }
  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

 private:
  SparseMatrix matrix_;
  double ridge_ = 0.0;
};

LaplacianMatrix laplacian(const Graph& g, double gamma = 0.0);

/// alpha' (L + gamma I) alpha, the cohesion penalty.
double cohesion_penalty(const LaplacianMatrix& L, const Eigen::VectorXd& alpha);

/// (L + gamma I) alpha, the cohesion gradient (half the penalty gradient).
Eigen::VectorXd cohesion_gradient(const LaplacianMatrix& L, const Eigen::VectorXd& alpha);

struct Components {
  std::vector<int> label;  // component index per node
  int count = 0;
  std::vector<std::vector<NodeId>> members() const;
};

/// Labels are assigned in order of each component's smallest node id.
Components connected_components(const Graph& g);

/// Laplacian blocks of an enlarged graph, test nodes first.
/// Rows/columns of l11 follow test_ids order, those of l22 follow train_ids
/// (every node not in test_ids, ascending).
struct LaplacianBlocks {
  std::vector<NodeId> test_ids;
  std::vector<NodeId> train_ids;
  SparseMatrix l11;
  SparseMatrix l12;
  SparseMatrix l22;
};

LaplacianBlocks split_for_prediction(const Graph& enlarged, std::span<const NodeId> test_ids);

}  // namespace netcoh
