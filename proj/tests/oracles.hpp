#pragma once

// Test-only reference implementations, kept deliberately independent of the
// library's linear-algebra code paths: the forward oracle walks the
// neighbor-sum definition node by node, the AUC oracle counts pairs, and
// gradients come from central finite differences through the public
// forward pass.

#include <cmath>
#include <utility>
#include <vector>

#include "glocalkd/gcn.hpp"
#include "glocalkd/graph.hpp"
#include "glocalkd/rng.hpp"

namespace oracles {

using glocalkd::Graph;
using glocalkd::GcnParams;
using glocalkd::Matrix;
using glocalkd::Rng;
using glocalkd::Vector;

// Per-node propagation: h_i^l = ReLU(sum_{j in N(i) U {i}}
// h_j^{l-1} W^{l-1} / sqrt((d_i+1)(d_j+1)) + b^{l-1}), no matrix products.
inline Matrix naive_gcn_nodes(const GcnParams& params, const Graph& g, const Matrix& x) {
  const int n = g.num_nodes;
  std::vector<std::vector<int>> neighbors(n);
  for (auto [a, b] : g.edges) {
    neighbors[a].push_back(b);
    neighbors[b].push_back(a);
  }
  std::vector<double> dtilde(n);
  for (int i = 0; i < n; ++i) dtilde[i] = neighbors[i].size() + 1.0;

  Matrix h = x;
  for (int l = 0; l < params.depth(); ++l) {
    const Matrix& w = params.weights[l];
    const int out = static_cast<int>(w.cols());
    Matrix next(n, out);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < out; ++d) {
        double acc = params.biases[l][d];
        for (int j : neighbors[i]) {
          double hw = 0.0;
          for (int c = 0; c < w.rows(); ++c) hw += h(j, c) * w(c, d);
          acc += hw / std::sqrt(dtilde[i] * dtilde[j]);
        }
        double hw = 0.0;
        for (int c = 0; c < w.rows(); ++c) hw += h(i, c) * w(c, d);
        acc += hw / dtilde[i];
        next(i, d) = acc > 0.0 ? acc : 0.0;
      }
    }
    h = std::move(next);
  }
  return h;
}

inline Vector naive_readout_max(const Matrix& h) {
  Vector out(h.cols());
  for (int d = 0; d < h.cols(); ++d) {
    double best = h(0, d);
    for (int i = 1; i < h.rows(); ++i) best = std::max(best, h(i, d));
    out[d] = best;
  }
  return out;
}

// ReLU gate pattern plus argmax routing of one forward pass, used to detect
// finite-difference stencils that cross a non-smooth point.
inline std::string activation_signature(const GcnParams& params, const glocalkd::NormAdj& adj,
                                        const Matrix& x) {
  const glocalkd::ForwardCache cache = glocalkd::gcn_forward(params, adj, x);
  std::string sig;
  for (const Matrix& z : cache.preacts) {
    for (int i = 0; i < z.rows(); ++i)
      for (int j = 0; j < z.cols(); ++j) sig.push_back(z(i, j) > 0.0 ? '1' : '0');
  }
  for (int row : cache.argmax_rows) sig.push_back(static_cast<char>('a' + row));
  return sig;
}

// AUC by explicit pair counting: ties between classes contribute 1/2.
inline double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  long pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  for (int l : labels) neg += (l == 0);
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

// Uniform random graph on n nodes where each pair is an edge with
// probability p; a spanning-path fallback keeps it connected enough to be
// interesting.
inline Graph random_graph(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  return glocalkd::build_graph(n, edges);
}

inline Matrix random_features(int n, int dim, Rng& rng) {
  Matrix x(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = rng.uniform(-1.5, 1.5);
  }
  return x;
}

}  // namespace oracles
