#include "glocalkd/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "glocalkd/errors.hpp"
#include "glocalkd/rng.hpp"

namespace glocalkd {

void TrainConfig::validate() const {
  std::string problems;
  auto complain = [&](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };
  if (lr <= 0.0) complain("lr must be positive");
  if (batch_size < 1) complain("batch_size must be at least 1");
  if (epochs < 1) complain("epochs must be at least 1");
  if (lambda < 0.0) complain("lambda must be nonnegative");
  if (layer_dims.empty()) complain("layer_dims must name at least one layer");
  for (int d : layer_dims) {
    if (d < 1) {
      complain("layer widths must be positive");
      break;
    }
  }
  if (!use_graph_term && !use_node_term) complain("at least one loss term must be enabled");
  if (!problems.empty()) throw ConfigError("invalid training config: " + problems);
}

Matrix featurize(const Graph& g, FeatureKind kind, int max_degree) {
  if (kind == FeatureKind::degree_one_hot) return degree_features(g, max_degree);
  if (!g.has_features()) {
    throw ConfigError("attributed model cannot featurize a plain graph");
  }
  return *g.features;
}

namespace {

Matrix model_features(const DistillModel& model, const Graph& g) {
  Matrix x = featurize(g, model.feature_kind, model.max_degree);
  if (x.cols() != model.arch.input_dim) {
    throw ConfigError("graph features have dimension " + std::to_string(x.cols()) +
                      ", model expects " + std::to_string(model.arch.input_dim));
  }
  return x;
}

struct PreparedGraph {
  NormAdj adj;
  Matrix x;
  Matrix target_nodes;  // frozen target H^K
  Vector target_graph;  // frozen target h_G
};

PreparedGraph prepare(const DistillModel& model, const Graph& g) {
  PreparedGraph p;
  p.adj = normalized_adjacency(g);
  p.x = model_features(model, g);
  const ForwardCache target = gcn_forward(model.target, p.adj, p.x);
  p.target_nodes = target.node_repr();
  p.target_graph = target.graph_repr;
  return p;
}

struct GraphErrors {
  double graph_sq = 0.0;  // ||h_G - h^_G||^2
  double node_msq = 0.0;  // (1/N) sum_i ||h_i - h^_i||^2
};

GraphErrors prediction_errors(const DistillModel& model, const PreparedGraph& p) {
  const ForwardCache pred = gcn_forward(model.predictor, p.adj, p.x);
  GraphErrors e;
  e.graph_sq = (pred.graph_repr - p.target_graph).squaredNorm();
  e.node_msq = (pred.node_repr() - p.target_nodes).squaredNorm() / p.x.rows();
  return e;
}

}  // namespace

std::pair<double, double> batch_losses(const DistillModel& model, std::span<const Graph> graphs) {
  double graph_sum = 0.0;
  double node_sum = 0.0;
  for (const Graph& g : graphs) {
    const GraphErrors e = prediction_errors(model, prepare(model, g));
    graph_sum += e.graph_sq;
    node_sum += e.node_msq;
  }
  const double count = static_cast<double>(graphs.size());
  return {graph_sum / count, node_sum / count};
}

TrainResult train(const GraphDataset& train_set, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw InputError("empty training set");

  DistillModel model;
  model.feature_kind = train_set.feature_kind;
  model.max_degree = train_set.feature_kind == FeatureKind::degree_one_hot
                         ? max_degree(train_set)
                         : 0;
  model.lambda = cfg.lambda;
  model.use_graph_term = cfg.use_graph_term;
  model.use_node_term = cfg.use_node_term;
  model.seed_target = cfg.seed_target;
  model.seed_predictor = cfg.seed_predictor;

  const int input_dim = train_set.feature_kind == FeatureKind::attributed
                            ? train_set.feature_dim()
                            : model.max_degree + 1;
  model.arch = GcnArch{input_dim, cfg.layer_dims};
  model.target = init_params(model.arch, cfg.seed_target);
  model.predictor = init_params(model.arch, cfg.seed_predictor);

  // The target is frozen, so its representations are constants of the run.
  const int m = train_set.size();
  std::vector<PreparedGraph> prepared;
  prepared.reserve(m);
  for (const Graph& g : train_set.graphs) prepared.push_back(prepare(model, g));

  AdamState adam = AdamState::init(model.predictor);
  Rng shuffle_rng(cfg.seed_shuffle);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.trace.reserve(cfg.epochs);

  const Vector zero_graph_grad = Vector::Zero(model.arch.output_dim());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0, epoch_graph = 0.0, epoch_node = 0.0;
    int steps = 0;

    for (int start = 0; start < m; start += cfg.batch_size) {
      const int batch = std::min(cfg.batch_size, m - start);
      GcnParams grads = GcnParams::zeros_like(model.predictor);
      double batch_graph = 0.0, batch_node = 0.0;

      for (int b = 0; b < batch; ++b) {
        const PreparedGraph& p = prepared[order[start + b]];
        const ForwardCache pred = gcn_forward(model.predictor, p.adj, p.x);
        const Vector graph_diff = pred.graph_repr - p.target_graph;
        const Matrix node_diff = pred.node_repr() - p.target_nodes;
        const double n = static_cast<double>(p.x.rows());
        batch_graph += graph_diff.squaredNorm() / batch;
        batch_node += node_diff.squaredNorm() / n / batch;

        const Vector grad_graph =
            cfg.use_graph_term ? Vector((2.0 / batch) * graph_diff) : zero_graph_grad;
        const Matrix grad_nodes =
            cfg.use_node_term
                ? Matrix((2.0 * cfg.lambda / (batch * n)) * node_diff)
                : Matrix(Matrix::Zero(node_diff.rows(), node_diff.cols()));
        grads.add_scaled(gcn_backward(model.predictor, pred, grad_graph, grad_nodes), 1.0);
      }

      const double loss = (cfg.use_graph_term ? batch_graph : 0.0) +
                          (cfg.use_node_term ? cfg.lambda * batch_node : 0.0);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(steps + 1));
      }
      adam_step(adam, model.predictor, grads, cfg.lr);
      epoch_loss += loss;
      epoch_graph += batch_graph;
      epoch_node += batch_node;
      ++steps;
    }

    result.trace.push_back(
        {epoch, epoch_loss / steps, epoch_graph / steps, epoch_node / steps});
  }

  result.model = std::move(model);
  return result;
}

double score(const DistillModel& model, const Graph& g) {
  const GraphErrors e = prediction_errors(model, prepare(model, g));
  return e.graph_sq + e.node_msq;
}

double score_variant(const DistillModel& model, const Graph& g, bool use_graph_term,
                     bool use_node_term) {
  if (!use_graph_term && !use_node_term) {
    throw ConfigError("score_variant needs at least one term enabled");
  }
  const GraphErrors e = prediction_errors(model, prepare(model, g));
  return (use_graph_term ? e.graph_sq : 0.0) + (use_node_term ? e.node_msq : 0.0);
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_params(std::ostream& out, const GcnParams& p) {
  for (int l = 0; l < p.depth(); ++l) {
    const Matrix& w = p.weights[l];
    out << "layer " << w.rows() << " " << w.cols() << "\n";
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) {
        if (c) out << " ";
        out << fmt_double(w(r, c));
      }
      out << "\n";
    }
    for (int c = 0; c < p.biases[l].size(); ++c) {
      if (c) out << " ";
      out << fmt_double(p.biases[l][c]);
    }
    out << "\n";
  }
}

GcnParams read_params(std::istream& in, const GcnArch& arch) {
  GcnParams p;
  std::string line;
  for (int l = 0; l < arch.depth(); ++l) {
    if (!std::getline(in, line)) throw InputError("model file truncated in layer header");
    std::istringstream head(line);
    std::string tag;
    int rows = 0, cols = 0;
    if (!(head >> tag >> rows >> cols) || tag != "layer" || rows != arch.in_dim(l) ||
        cols != arch.layer_dims[l]) {
      throw InputError("model file: bad layer header '" + line + "'");
    }
    Matrix w(rows, cols);
    for (int r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) throw InputError("model file truncated in weights");
      std::istringstream row(line);
      for (int c = 0; c < cols; ++c) {
        if (!(row >> w(r, c))) throw InputError("model file: short weight row");
      }
    }
    if (!std::getline(in, line)) throw InputError("model file truncated in bias");
    std::istringstream brow(line);
    Vector b(cols);
    for (int c = 0; c < cols; ++c) {
      if (!(brow >> b[c])) throw InputError("model file: short bias row");
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

}  // namespace

void save_model(const std::filesystem::path& path, const DistillModel& model) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "glocalkd-model 1\n";
  out << "arch " << model.arch.input_dim;
  for (int d : model.arch.layer_dims) out << " " << d;
  out << "\n";
  out << "feature_kind " << to_string(model.feature_kind) << "\n";
  out << "max_degree " << model.max_degree << "\n";
  out << "lambda " << fmt_double(model.lambda) << "\n";
  out << "terms " << (model.use_graph_term ? 1 : 0) << " " << (model.use_node_term ? 1 : 0)
      << "\n";
  out << "seeds " << model.seed_target << " " << model.seed_predictor << "\n";
  out << "target\n";
  write_params(out, model.target);
  out << "predictor\n";
  write_params(out, model.predictor);
}

DistillModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "glocalkd-model 1") {
    throw InputError(path.string() + " is not a glocalkd model file");
  }

  DistillModel model;
  if (!std::getline(in, line)) throw InputError("model file truncated");
  {
    std::istringstream arch_line(line);
    std::string tag;
    if (!(arch_line >> tag >> model.arch.input_dim) || tag != "arch") {
      throw InputError("model file: bad arch line");
    }
    int d;
    while (arch_line >> d) model.arch.layer_dims.push_back(d);
    if (model.arch.layer_dims.empty()) throw InputError("model file: arch has no layers");
  }

  auto field = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0) {
      throw InputError("model file: expected '" + key + " ...'");
    }
    return line.substr(key.size() + 1);
  };
  model.feature_kind = feature_kind_from_string(field("feature_kind"));
  model.max_degree = std::stoi(field("max_degree"));
  model.lambda = std::stod(field("lambda"));
  {
    std::istringstream terms(field("terms"));
    int g = 1, n = 1;
    terms >> g >> n;
    model.use_graph_term = g != 0;
    model.use_node_term = n != 0;
  }
  {
    std::istringstream seeds(field("seeds"));
    seeds >> model.seed_target >> model.seed_predictor;
  }
  if (!std::getline(in, line) || line != "target") throw InputError("model file: expected target");
  model.target = read_params(in, model.arch);
  if (!std::getline(in, line) || line != "predictor") {
    throw InputError("model file: expected predictor");
  }
  model.predictor = read_params(in, model.arch);
  return model;
}

}  // namespace glocalkd
