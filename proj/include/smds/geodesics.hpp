#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "smds/dissim.hpp"

namespace smds {

struct GraphRule {
  enum class Kind { Knn, Epsilon };
  Kind kind = Kind::Knn;
  Index k = 1;
  double radius = 0;

  static GraphRule knn(Index k) { return {Kind::Knn, k, 0.0}; }
  static GraphRule epsilon(double r) { return {Kind::Epsilon, 0, r}; }
};

template <typename Scalar = double>
struct Edge {
  Index i = 0;
  Index j = 0;
  Scalar weight = 0;
};

/// Undirected graph with Euclidean edge lengths, edges stored once with i < j.
template <typename Scalar = double>
struct NeighborhoodGraph {
  Index n = 0;
  std::vector<Edge<Scalar>> edges;
  GraphRule rule;
  /// indices into `edges` of zero-length edges (coincident points)
  std::vector<std::size_t> zero_weight_edges;
};

/// Raised when the graph has more than one connected component.
class DisconnectedGraphError : public Error {
 public:
  explicit DisconnectedGraphError(std::vector<std::vector<Index>> components)
      : Error(ErrorCode::DisconnectedGraph,
              std::to_string(components.size()) + " connected components"),
        components_(std::move(components)) {}

  const std::vector<std::vector<Index>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<Index>> components_;
};

/// Symmetrized k-NN (union) or epsilon-ball graph over the rows of `points`.
template <typename Derived>
NeighborhoodGraph<typename Derived::Scalar> build_graph(const Eigen::MatrixBase<Derived>& points,
                                                        const GraphRule& rule) {
  using Scalar = typename Derived::Scalar;
  if (rule.kind == GraphRule::Kind::Knn && rule.k < 1)
    throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (rule.kind == GraphRule::Kind::Epsilon && !(rule.radius > 0))
    throw Error(ErrorCode::InvalidArgument, "radius must be positive");

  const Index n = points.rows();
  Matrix<Scalar> dist = euclidean_distances(points).matrix();
  Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> adj =
      Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);

  if (rule.kind == GraphRule::Kind::Knn) {
    std::vector<Index> order;
    const Index k = std::min(rule.k, n - 1);
    for (Index i = 0; i < n; ++i) {
      order.clear();
      for (Index j = 0; j < n; ++j)
        if (j != i) order.push_back(j);
      std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
        return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
      });
      for (Index t = 0; t < k; ++t) {
        const Index j = order[static_cast<std::size_t>(t)];
        adj(i, j) = adj(j, i) = 1;
      }
    }
  } else {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (dist(i, j) <= Scalar(rule.radius)) adj(i, j) = adj(j, i) = 1;
  }

  NeighborhoodGraph<Scalar> g;
  g.n = n;
  g.rule = rule;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (!adj(i, j)) continue;
      if (dist(i, j) == Scalar(0)) g.zero_weight_edges.push_back(g.edges.size());
      g.edges.push_back({i, j, dist(i, j)});
    }
  }
  return g;
}

/// Connected components, each sorted, ordered by smallest member.
template <typename Scalar>
std::vector<std::vector<Index>> connected_components(const NeighborhoodGraph<Scalar>& g) {
  std::vector<Index> parent(static_cast<std::size_t>(g.n));
  std::iota(parent.begin(), parent.end(), Index(0));
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& e : g.edges) {
    const Index a = find(e.i), b = find(e.j);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<std::vector<Index>> comps;
  std::vector<Index> slot(static_cast<std::size_t>(g.n), -1);
  for (Index v = 0; v < g.n; ++v) {
    const Index r = find(v);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<Index>(comps.size());
      comps.emplace_back();
    }
    comps[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(v);
  }
  return comps;
}

/// All-pairs shortest path lengths via one Dijkstra run per source.
template <typename Scalar>
DissimilarityMatrix<Scalar> shortest_path_dissimilarity(const NeighborhoodGraph<Scalar>& g) {
  auto comps = connected_components(g);
  if (comps.size() > 1) throw DisconnectedGraphError(std::move(comps));

  const Index n = g.n;
  std::vector<std::vector<std::pair<Index, Scalar>>> nbrs(static_cast<std::size_t>(n));
  for (const auto& e : g.edges) {
    nbrs[static_cast<std::size_t>(e.i)].push_back({e.j, e.weight});
    nbrs[static_cast<std::size_t>(e.j)].push_back({e.i, e.weight});
  }

  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  Matrix<Scalar> out(n, n);
  using Item = std::pair<Scalar, Index>;
  std::vector<Scalar> dist(static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), inf);
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[static_cast<std::size_t>(s)] = 0;
    heap.push({Scalar(0), s});
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[static_cast<std::size_t>(u)]) continue;
      for (const auto& [v, w] : nbrs[static_cast<std::size_t>(u)]) {
        const Scalar alt = du + w;
        if (alt < dist[static_cast<std::size_t>(v)]) {
          dist[static_cast<std::size_t>(v)] = alt;
          heap.push({alt, v});
        }
      }
    }
    for (Index t = 0; t < n; ++t) out(s, t) = dist[static_cast<std::size_t>(t)];
  }
  out = out.cwiseMin(out.transpose()).eval();
  out.diagonal().setZero();
  return DissimilarityMatrix<Scalar>::unchecked(std::move(out));
}

}  // namespace smds
