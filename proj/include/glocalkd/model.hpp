#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "glocalkd/dataset.hpp"
#include "glocalkd/gcn.hpp"

namespace glocalkd {

/// Training hyperparameters. Defaults follow the reference protocol:
/// three GCN layers (512, 512, 256), lr 1e-4, batch 300, 150 epochs,
/// lambda 1.
struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 300;
  int epochs = 150;
  double lambda = 1.0;
  bool use_graph_term = true;
  bool use_node_term = true;
  std::uint64_t seed_target = 1;
  std::uint64_t seed_predictor = 2;
  std::uint64_t seed_shuffle = 3;
  std::vector<int> layer_dims = {512, 512, 256};

  void validate() const;  // throws ConfigError listing every violation
};

/// Frozen random target network plus trained predictor, with everything
/// needed to featurize and score unseen graphs. Immutable once trained.
struct DistillModel {
  GcnArch arch;
  GcnParams target;
  GcnParams predictor;
  FeatureKind feature_kind = FeatureKind::degree_one_hot;
  int max_degree = 0;  // degree-one-hot featurization bucket cap
  double lambda = 1.0;
  bool use_graph_term = true;
  bool use_node_term = true;
  std::uint64_t seed_target = 0;
  std::uint64_t seed_predictor = 0;
};

struct TraceRow {
  int epoch = 0;       // 1-based
  double loss = 0.0;   // mean over optimizer steps of the joint objective
  double graph_loss = 0.0;
  double node_loss = 0.0;
};

struct TrainResult {
  DistillModel model;
  std::vector<TraceRow> trace;
};

/// Feature matrix a model consumes for g: the stored attributes for
/// attributed models (dimension checked), one-hot clamped degrees
/// otherwise.
Matrix featurize(const Graph& g, FeatureKind kind, int max_degree);

/// Mean graph-level and node-level squared prediction errors over the
/// given graphs: (mean_G ||h_G - h^_G||^2, mean_G mean_i ||h_i - h^_i||^2).
std::pair<double, double> batch_losses(const DistillModel& model, std::span<const Graph> graphs);

/// Joint random distillation: the target network stays frozen at its
/// random initialization while the predictor takes one Adam step per
/// batch on L = L_graph + lambda * L_node (terms gated by the config
/// flags). Batches are contiguous slices of a fresh shuffle each epoch;
/// the last partial batch is kept. Deterministic per seeds.
TrainResult train(const GraphDataset& train_set, const TrainConfig& cfg);

/// Anomaly score: ||h_G - h^_G||^2 + (1/N) sum_i ||h_i - h^_i||^2.
double score(const DistillModel& model, const Graph& g);

/// Only the enabled terms of the anomaly score. At least one flag must be
/// set.
double score_variant(const DistillModel& model, const Graph& g, bool use_graph_term,
                     bool use_node_term);

/// Text snapshot of the full model; loading reproduces scores bit-exactly.
void save_model(const std::filesystem::path& path, const DistillModel& model);
DistillModel load_model(const std::filesystem::path& path);

}  // namespace glocalkd
