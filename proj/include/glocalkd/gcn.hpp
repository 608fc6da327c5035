#pragma once

#include <cstdint>
#include <vector>

#include "glocalkd/graph.hpp"

namespace glocalkd {

/// Layer widths of a K-layer GCN. layer_dims.back() is the representation
/// dimension k shared by node and graph outputs.
struct GcnArch {
  int input_dim = 0;
  std::vector<int> layer_dims;

  int depth() const { return static_cast<int>(layer_dims.size()); }
  int output_dim() const { return layer_dims.back(); }
  int in_dim(int layer) const { return layer == 0 ? input_dim : layer_dims[layer - 1]; }
};

/// Per-layer weight matrices (in x out) and bias vectors. Also used to
/// carry gradients, which share the same shapes.
struct GcnParams {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  int depth() const { return static_cast<int>(weights.size()); }
  static GcnParams zeros_like(const GcnParams& p);
  void add_scaled(const GcnParams& other, double scale);
  bool all_finite() const;
};

/// Everything the backward pass needs from one forward evaluation.
struct ForwardCache {
  NormAdj adj;
  std::vector<Matrix> activations;  // H^0 = X, ..., H^K
  std::vector<Matrix> preacts;      // Z^1, ..., Z^K
  Vector graph_repr;                // h_G = max-pool of H^K rows
  std::vector<int> argmax_rows;     // pooled row per output dimension

  const Matrix& node_repr() const { return activations.back(); }
};

/// Kaiming-uniform weights, entries i.i.d. on (-b, b) with
/// b = sqrt(6 / fan_in); biases zero. Deterministic per seed.
GcnParams init_params(const GcnArch& arch, std::uint64_t seed);

/// H^l = ReLU(adj * H^{l-1} * W^{l-1} + b^{l-1}) with H^0 = X, followed by
/// coordinatewise max pooling over node representations.
ForwardCache gcn_forward(const GcnParams& params, const NormAdj& adj, const Matrix& x);

/// Coordinatewise max over rows; ties resolve to the smallest row index.
/// argmax_rows, when non-null, receives the pooled row per dimension.
Vector readout_max(const Matrix& h, std::vector<int>* argmax_rows = nullptr);

/// Exact reverse-mode gradients of a scalar loss whose cotangents w.r.t.
/// the graph representation (grad_graph) and the final node
/// representations (grad_nodes) are given. The pooled-row routing uses the
/// cached argmax, ReLU gates on Z > 0 (subgradient 0 at Z = 0), and adj is
/// treated as constant.
GcnParams gcn_backward(const GcnParams& params, const ForwardCache& cache,
                       const Vector& grad_graph, const Matrix& grad_nodes);

/// Adam moment accumulators shaped like the parameters they update.
struct AdamState {
  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;
  long t = 0;

  static AdamState init(const GcnParams& params);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

/// One bias-corrected Adam update of params in place. Throws NumericError
/// on non-finite gradients without touching state or params.
void adam_step(AdamState& state, GcnParams& params, const GcnParams& grads, double lr);

}  // namespace glocalkd
