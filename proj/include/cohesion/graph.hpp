#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cohesion/linalg.hpp"

namespace cohesion {

/// Oriented edge: the tail carries +1 in the incidence column, the head -1.
struct Edge {
  std::size_t tail = 0;
  std::size_t head = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class GraphErrorKind { CycleDetected, Disconnected, SelfLoop, DuplicateEdge, BadIndex, TooFewNodes };

const char* to_string(GraphErrorKind kind);

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  GraphErrorKind kind() const noexcept { return kind_; }

 private:
  GraphErrorKind kind_;
};

/// Connected acyclic graph on n >= 2 nodes with n - 1 oriented edges.
///
/// Only constructible through build_tree, so every instance satisfies the
/// tree invariants. Immutable afterwards.
class TreeGraph {
 public:
  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  /// Neighbour lists in edge order.
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return adjacency_; }

  friend TreeGraph build_tree(std::size_t n, std::vector<Edge> edges);

 private:
  TreeGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Validates and builds a tree. Throws GraphError.
TreeGraph build_tree(std::size_t n, std::vector<Edge> edges);

/// Path 0 - 1 - ... - (n-1) with edges (i, i+1).
TreeGraph line_graph(std::size_t n);

/// Star centred at node 0 with edges (0, i).
TreeGraph star_graph(std::size_t leaves);

/// n x m incidence matrix; column e has +1 at tail(e), -1 at head(e).
template <typename Scalar = double>
Matrix<Scalar> incidence(const TreeGraph& g) {
  Matrix<Scalar> b = Matrix<Scalar>::Zero(Eigen::Index(g.num_nodes()), Eigen::Index(g.num_edges()));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    b(Eigen::Index(g.edge(e).tail), Eigen::Index(e)) = Scalar(1);
    b(Eigen::Index(g.edge(e).head), Eigen::Index(e)) = Scalar(-1);
  }
  return b;
}

/// Node Laplacian B B^T (n x n).
template <typename Scalar = double>
Matrix<Scalar> node_laplacian(const TreeGraph& g) {
  const Matrix<Scalar> b = incidence<Scalar>(g);
  return b * b.transpose();
}

/// Edge Laplacian B^T B (m x m); positive definite on a tree.
template <typename Scalar = double>
SymmetricMatrix<Scalar> edge_laplacian(const TreeGraph& g) {
  const Matrix<Scalar> b = incidence<Scalar>(g);
  return SymmetricMatrix<Scalar>::symmetrized(b.transpose() * b);
}

}  // namespace cohesion
