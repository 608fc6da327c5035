#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace glocalkd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetrically normalized adjacency with self-loops,
/// (D+I)^{-1/2} (A+I) (D+I)^{-1/2}, materialized dense.
using NormAdj = Eigen::MatrixXd;

/// Undirected, unweighted graph with an optional node-feature matrix.
/// Edges are stored canonically: (i, j) with i < j, sorted, deduplicated,
/// no self-loops. Immutable after construction via build_graph.
struct Graph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;
  std::optional<Matrix> features;  // num_nodes x n when present
  std::optional<int> label;        // 1 = anomalous

  bool has_features() const { return features.has_value(); }
  int feature_dim() const { return features ? static_cast<int>(features->cols()) : 0; }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Validates and canonicalizes. Throws InputError for out-of-range
/// endpoints, self-loops, or a feature matrix whose row count differs
/// from num_nodes.
Graph build_graph(int num_nodes, const std::vector<std::pair<int, int>>& edges,
                  std::optional<Matrix> features = std::nullopt);

/// Degree of every node (self-loops excluded; they only enter normalization).
std::vector<int> node_degrees(const Graph& g);

NormAdj normalized_adjacency(const Graph& g);

/// One-hot degree features, row i = one_hot(min(deg(i), max_degree)) over
/// max_degree + 1 buckets. Used for plain graphs.
Matrix degree_features(const Graph& g, int max_degree);

}  // namespace glocalkd
