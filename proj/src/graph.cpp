#include "glocalkd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glocalkd/errors.hpp"

namespace glocalkd {

Graph build_graph(int num_nodes, const std::vector<std::pair<int, int>>& edges,
                  std::optional<Matrix> features) {
  if (num_nodes < 1) {
    throw InputError("graph must have at least one node, got " + std::to_string(num_nodes));
  }
  Graph g;
  g.num_nodes = num_nodes;
  g.edges.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= num_nodes || b < 0 || b >= num_nodes) {
      throw InputError("edge endpoint out of range: (" + std::to_string(a) + ", " +
                       std::to_string(b) + ") with " + std::to_string(num_nodes) + " nodes");
    }
    if (a == b) {
      throw InputError("self-loop rejected at node " + std::to_string(a));
    }
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

  if (features) {
    if (features->rows() != num_nodes) {
      throw InputError("feature matrix has " + std::to_string(features->rows()) +
                       " rows, expected " + std::to_string(num_nodes));
    }
    if (features->cols() < 1) {
      throw InputError("feature matrix must have at least one column");
    }
    g.features = std::move(features);
  }
  return g;
}

std::vector<int> node_degrees(const Graph& g) {
  std::vector<int> deg(g.num_nodes, 0);
  for (const auto& [i, j] : g.edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

NormAdj normalized_adjacency(const Graph& g) {
  const int n = g.num_nodes;
  const std::vector<int> deg = node_degrees(g);

  Vector inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(deg[i] + 1.0);

  NormAdj adj = NormAdj::Zero(n, n);
  for (int i = 0; i < n; ++i) adj(i, i) = inv_sqrt[i] * inv_sqrt[i];
  for (const auto& [i, j] : g.edges) {
    const double w = inv_sqrt[i] * inv_sqrt[j];
    adj(i, j) = w;
    adj(j, i) = w;
  }
  return adj;
}

Matrix degree_features(const Graph& g, int max_degree) {
  if (max_degree < 0) throw InputError("max_degree must be nonnegative");
  const std::vector<int> deg = node_degrees(g);
  Matrix x = Matrix::Zero(g.num_nodes, max_degree + 1);
  for (int i = 0; i < g.num_nodes; ++i) {
    x(i, std::min(deg[i], max_degree)) = 1.0;
  }
  return x;
}

}  // namespace glocalkd
