#include "netcoh/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "netcoh/errors.hpp"

namespace netcoh {

Graph from_edge_list(std::span<const Edge> rows, int n) {
  if (n < 0) throw InvalidInput("node count must be nonnegative");
  Graph g(n);
  g.edges_.reserve(rows.size());
  for (const Edge& e : rows) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw InvalidInput("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                         ") references a node outside [0, " + std::to_string(n) + ")");
    if (e.u == e.v) throw InvalidInput("self-loop on node " + std::to_string(e.u));
    if (!std::isfinite(e.w) || e.w < 0.0)
      throw InvalidInput("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                         ") has a negative or non-finite weight");
    if (e.w == 0.0) continue;
    g.edges_.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < g.edges_.size(); ++i) {
    if (g.edges_[i].u == g.edges_[i - 1].u && g.edges_[i].v == g.edges_[i - 1].v)
      throw InvalidInput("duplicate edge (" + std::to_string(g.edges_[i].u) + ", " +
                         std::to_string(g.edges_[i].v) + ")");
  }
  g.build_adjacency();
  return g;
}

void Graph::build_adjacency() {
  offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[cursor[e.u]++] = {e.v, e.w};
    adjacency_[cursor[e.v]++] = {e.u, e.w};
  }
}

Eigen::VectorXd Graph::degrees() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  for (const Edge& e : edges_) {
    d[e.u] += e.w;
    d[e.v] += e.w;
  }
  return d;
}

double Graph::total_weight() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.w;
  return s;
}

Graph Graph::induced_subgraph(std::span<const NodeId> ids) const {
  std::vector<int> local(static_cast<std::size_t>(n_), -1);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= n_) throw InvalidInput("induced_subgraph: node id out of range");
    if (local[ids[i]] != -1) throw InvalidInput("induced_subgraph: repeated node id");
    local[ids[i]] = static_cast<int>(i);
  }
  std::vector<Edge> kept;
  for (const Edge& e : edges_) {
    if (local[e.u] >= 0 && local[e.v] >= 0) kept.push_back({local[e.u], local[e.v], e.w});
  }
  return from_edge_list(kept, static_cast<int>(ids.size()));
}

LaplacianMatrix laplacian(const Graph& g, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidInput("laplacian: ridge must be nonnegative");
  const int n = g.node_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * g.edge_count() + static_cast<std::size_t>(n));
  Eigen::VectorXd d = g.degrees();
  for (const Edge& e : g.edges()) {
    t.emplace_back(e.u, e.v, -e.w);
    t.emplace_back(e.v, e.u, -e.w);
  }
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, d[i] + gamma);
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  m.makeCompressed();
  return LaplacianMatrix(std::move(m), gamma);
}

namespace {
void check_dim(const LaplacianMatrix& L, const Eigen::VectorXd& alpha) {
  if (alpha.size() != L.dim())
    throw InvalidInput("alpha has length " + std::to_string(alpha.size()) +
                       " but the Laplacian has dimension " + std::to_string(L.dim()));
}
}  // namespace

double cohesion_penalty(const LaplacianMatrix& L, const Eigen::VectorXd& alpha) {
  check_dim(L, alpha);
  return std::max(0.0, alpha.dot(L.matrix() * alpha));
}

Eigen::VectorXd cohesion_gradient(const LaplacianMatrix& L, const Eigen::VectorXd& alpha) {
  check_dim(L, alpha);
  return L.matrix() * alpha;
}

std::vector<std::vector<NodeId>> Components::members() const {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(count));
  for (std::size_t v = 0; v < label.size(); ++v) out[label[v]].push_back(static_cast<NodeId>(v));
  return out;
}

Components connected_components(const Graph& g) {
  Components c;
  c.label.assign(static_cast<std::size_t>(g.node_count()), -1);
  std::queue<NodeId> q;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (c.label[s] != -1) continue;
    c.label[s] = c.count;
    q.push(s);
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (const auto& nb : g.neighbors(u)) {
        if (c.label[nb.node] == -1) {
          c.label[nb.node] = c.count;
          q.push(nb.node);
        }
      }
    }
    ++c.count;
  }
  return c;
}

LaplacianBlocks split_for_prediction(const Graph& enlarged, std::span<const NodeId> test_ids) {
  if (test_ids.empty()) throw InvalidInput("split_for_prediction: no test nodes given");
  const int n = enlarged.node_count();
  LaplacianBlocks b;
  b.test_ids.assign(test_ids.begin(), test_ids.end());
  // position >= 0: test slot; position encoded as -(k+2) for train slot k
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < test_ids.size(); ++i) {
    NodeId v = test_ids[i];
    if (v < 0 || v >= n) throw InvalidInput("split_for_prediction: test id out of range");
    if (slot[v] != -1) throw InvalidInput("split_for_prediction: repeated test id");
    slot[v] = static_cast<int>(i);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (slot[v] == -1) {
      slot[v] = -static_cast<int>(b.train_ids.size()) - 2;
      b.train_ids.push_back(v);
    }
  }
  const auto n1 = static_cast<Eigen::Index>(b.test_ids.size());
  const auto n2 = static_cast<Eigen::Index>(b.train_ids.size());
  std::vector<Eigen::Triplet<double>> t11, t12, t22;
  Eigen::VectorXd d = enlarged.degrees();
  for (NodeId v = 0; v < n; ++v) {
    if (slot[v] >= 0)
      t11.emplace_back(slot[v], slot[v], d[v]);
    else
      t22.emplace_back(-slot[v] - 2, -slot[v] - 2, d[v]);
  }
  for (const Edge& e : enlarged.edges()) {
    const int su = slot[e.u], sv = slot[e.v];
    if (su >= 0 && sv >= 0) {
      t11.emplace_back(su, sv, -e.w);
      t11.emplace_back(sv, su, -e.w);
    } else if (su < 0 && sv < 0) {
      t22.emplace_back(-su - 2, -sv - 2, -e.w);
      t22.emplace_back(-sv - 2, -su - 2, -e.w);
    } else if (su >= 0) {
      t12.emplace_back(su, -sv - 2, -e.w);
    } else {
      t12.emplace_back(sv, -su - 2, -e.w);
    }
  }
  b.l11.resize(n1, n1);
  b.l12.resize(n1, n2);
  b.l22.resize(n2, n2);
  b.l11.setFromTriplets(t11.begin(), t11.end());
  b.l12.setFromTriplets(t12.begin(), t12.end());
  b.l22.setFromTriplets(t22.begin(), t22.end());
  return b;
}

}  // namespace netcoh
