#include "cohesion/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace cohesion {

const char* to_string(GraphErrorKind kind) {
  switch (kind) {
    case GraphErrorKind::CycleDetected: return "CycleDetected";
    case GraphErrorKind::Disconnected: return "Disconnected";
    case GraphErrorKind::SelfLoop: return "SelfLoop";
    case GraphErrorKind::DuplicateEdge: return "DuplicateEdge";
    case GraphErrorKind::BadIndex: return "BadIndex";
    case GraphErrorKind::TooFewNodes: return "TooFewNodes";
  }
  return "unknown";
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // false when a and b were already joined
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
};

std::string edge_label(std::size_t e, const Edge& edge) {
  return "edge " + std::to_string(e) + " (" + std::to_string(edge.tail) + ", " + std::to_string(edge.head) + ")";
}

}  // namespace

TreeGraph::TreeGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), adjacency_(n) {
  for (const Edge& e : edges_) {
    adjacency_[e.tail].push_back(e.head);
    adjacency_[e.head].push_back(e.tail);
  }
}

TreeGraph build_tree(std::size_t n, std::vector<Edge> edges) {
  if (n < 2) {
    throw GraphError(GraphErrorKind::TooFewNodes, "a tree needs at least 2 nodes, got " + std::to_string(n));
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  DisjointSets components(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    if (edge.tail >= n || edge.head >= n) {
      throw GraphError(GraphErrorKind::BadIndex, edge_label(e, edge) + " references a node outside [0, " +
                                                     std::to_string(n) + ")");
    }
    if (edge.tail == edge.head) {
      throw GraphError(GraphErrorKind::SelfLoop, edge_label(e, edge) + " is a self-loop");
    }
    const auto key = std::minmax(edge.tail, edge.head);
    if (!seen.insert(key).second) {
      throw GraphError(GraphErrorKind::DuplicateEdge, edge_label(e, edge) + " duplicates an earlier edge");
    }
    if (!components.unite(edge.tail, edge.head)) {
      throw GraphError(GraphErrorKind::CycleDetected, edge_label(e, edge) + " closes a cycle");
    }
  }
  // Acyclic with fewer than n - 1 edges leaves more than one component.
  if (edges.size() != n - 1) {
    throw GraphError(GraphErrorKind::Disconnected, "graph with " + std::to_string(n) + " nodes and " +
                                                       std::to_string(edges.size()) + " edges is not connected");
  }
  return TreeGraph(n, std::move(edges));
}

TreeGraph line_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return build_tree(n, std::move(edges));
}

TreeGraph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return build_tree(leaves + 1, std::move(edges));
}

}  // namespace cohesion
