#include "glocalkd/gcn.hpp"

#include <cmath>
#include <string>

#include "glocalkd/errors.hpp"
#include "glocalkd/rng.hpp"

namespace glocalkd {

GcnParams GcnParams::zeros_like(const GcnParams& p) {
  GcnParams z;
  z.weights.reserve(p.weights.size());
  z.biases.reserve(p.biases.size());
  for (const auto& w : p.weights) z.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : p.biases) z.biases.push_back(Vector::Zero(b.size()));
  return z;
}

void GcnParams::add_scaled(const GcnParams& other, double scale) {
  for (int l = 0; l < depth(); ++l) {
    weights[l] += scale * other.weights[l];
    biases[l] += scale * other.biases[l];
  }
}

bool GcnParams::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

GcnParams init_params(const GcnArch& arch, std::uint64_t seed) {
  Rng rng(seed);
  GcnParams p;
  for (int l = 0; l < arch.depth(); ++l) {
    const int fan_in = arch.in_dim(l);
    const int fan_out = arch.layer_dims[l];
    const double bound = std::sqrt(6.0 / fan_in);
    Matrix w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Vector::Zero(fan_out));
  }
  return p;
}

Vector readout_max(const Matrix& h, std::vector<int>* argmax_rows) {
  const int n = static_cast<int>(h.rows());
  const int k = static_cast<int>(h.cols());
  Vector out(k);
  if (argmax_rows) argmax_rows->assign(k, 0);
  for (int d = 0; d < k; ++d) {
    int best = 0;
    double val = h(0, d);
    for (int i = 1; i < n; ++i) {
      if (h(i, d) > val) {
        val = h(i, d);
        best = i;
      }
    }
    out[d] = val;
    if (argmax_rows) (*argmax_rows)[d] = best;
  }
  return out;
}

ForwardCache gcn_forward(const GcnParams& params, const NormAdj& adj, const Matrix& x) {
  if (adj.rows() != adj.cols() || adj.rows() != x.rows()) {
    throw ConfigError("adjacency is " + std::to_string(adj.rows()) + "x" +
                      std::to_string(adj.cols()) + " but features have " +
                      std::to_string(x.rows()) + " rows");
  }
  if (x.cols() != params.weights[0].rows()) {
    throw ConfigError("input feature dimension " + std::to_string(x.cols()) +
                      " does not match first-layer width " +
                      std::to_string(params.weights[0].rows()));
  }

  ForwardCache cache;
  cache.adj = adj;
  cache.activations.reserve(params.depth() + 1);
  cache.preacts.reserve(params.depth());
  cache.activations.push_back(x);
  for (int l = 0; l < params.depth(); ++l) {
    Matrix z = adj * cache.activations.back() * params.weights[l];
    z.rowwise() += params.biases[l].transpose();
    cache.activations.push_back(z.cwiseMax(0.0));
    cache.preacts.push_back(std::move(z));
  }
  cache.graph_repr = readout_max(cache.activations.back(), &cache.argmax_rows);
  return cache;
}

GcnParams gcn_backward(const GcnParams& params, const ForwardCache& cache,
                       const Vector& grad_graph, const Matrix& grad_nodes) {
  const int depth = params.depth();
  const Matrix& node_repr = cache.node_repr();
  if (static_cast<int>(cache.preacts.size()) != depth) {
    throw ConfigError("forward cache depth does not match parameters");
  }
  if (grad_graph.size() != node_repr.cols() || grad_nodes.rows() != node_repr.rows() ||
      grad_nodes.cols() != node_repr.cols()) {
    throw ConfigError("cotangent shapes do not match cached representations");
  }

  // Route the graph-level cotangent to the pooled rows.
  Matrix grad_h = grad_nodes;
  for (int d = 0; d < grad_graph.size(); ++d) {
    grad_h(cache.argmax_rows[d], d) += grad_graph[d];
  }

  GcnParams grads = GcnParams::zeros_like(params);
  for (int l = depth - 1; l >= 0; --l) {
    const Matrix gated =
        (cache.preacts[l].array() > 0.0).select(grad_h, Matrix::Zero(grad_h.rows(), grad_h.cols()));
    const Matrix propagated = cache.adj * cache.activations[l];  // adj is symmetric
    grads.weights[l] = propagated.transpose() * gated;
    grads.biases[l] = gated.colwise().sum().transpose();
    if (l > 0) {
      grad_h = cache.adj * (gated * params.weights[l].transpose());
    }
  }
  return grads;
}

AdamState AdamState::init(const GcnParams& params) {
  AdamState s;
  for (const auto& w : params.weights) {
    s.m_w.push_back(Matrix::Zero(w.rows(), w.cols()));
    s.v_w.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : params.biases) {
    s.m_b.push_back(Vector::Zero(b.size()));
    s.v_b.push_back(Vector::Zero(b.size()));
  }
  return s;
}

namespace {

template <typename T>
void adam_update(T& param, T& m, T& v, const T& g, double lr, long t) {
  m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
  v = kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * g.array().square();
  const double m_corr = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
  const double v_corr = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
  param.array() -= lr * (m.array() / m_corr) / ((v.array() / v_corr).sqrt() + kAdamEps);
}

}  // namespace

void adam_step(AdamState& state, GcnParams& params, const GcnParams& grads, double lr) {
  if (!grads.all_finite()) {
    throw NumericError("non-finite gradient at optimizer step " + std::to_string(state.t + 1));
  }
  ++state.t;
  for (int l = 0; l < params.depth(); ++l) {
    adam_update(params.weights[l], state.m_w[l], state.v_w[l], grads.weights[l], lr, state.t);
    adam_update(params.biases[l], state.m_b[l], state.v_b[l], grads.biases[l], lr, state.t);
  }
}

}  // namespace glocalkd
