#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "glocalkd/graph.hpp"

namespace glocalkd {

enum class FeatureKind { attributed, degree_one_hot };

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

/// Ordered graph collection with aligned integer labels. After
/// parse_benchmark_dir the labels are the original class ids; after
/// to_anomaly_labels they are binary anomaly flags (1 = anomalous).
struct GraphDataset {
  std::vector<Graph> graphs;
  std::vector<int> labels;
  std::string name;
  FeatureKind feature_kind = FeatureKind::degree_one_hot;

  int size() const { return static_cast<int>(graphs.size()); }
  /// Shared attribute dimension; 0 for plain (degree-one-hot) datasets.
  int feature_dim() const;
  int count_label(int label) const;
};

/// Stratified fold assignment, one fold index in [0, k) per graph.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;
  std::uint64_t seed = 0;
};

/// Reads the standard multi-file benchmark layout: <DS>_A.txt (1-based
/// comma-separated edge endpoints), <DS>_graph_indicator.txt,
/// <DS>_graph_labels.txt, optionally <DS>_node_attributes.txt and
/// <DS>_node_labels.txt. Attributes win over node labels when both exist;
/// with neither the dataset is plain and featurized by degree at training
/// time.
GraphDataset parse_benchmark_dir(const std::filesystem::path& dir);

/// Converts class labels to binary anomaly flags. Without an explicit
/// anomaly class the least frequent class becomes 1 (ties break toward the
/// smallest class id). Graph structure is untouched.
GraphDataset to_anomaly_labels(const GraphDataset& ds,
                               std::optional<int> anomaly_class = std::nullopt);

/// Deterministic stratified k-fold assignment: members of each class are
/// shuffled and dealt to the currently least-filled fold, so fold sizes
/// differ by at most one per class.
FoldPlan stratified_kfold(const GraphDataset& ds, int k, std::uint64_t seed);

/// The graphs of one fold (in_fold = true) or its complement. When
/// normals_only is set, anomalous graphs (label 1) are dropped, matching
/// the semi-supervised training protocol.
GraphDataset select_fold(const GraphDataset& ds, const FoldPlan& plan, int fold, bool in_fold,
                         bool normals_only = false);

/// Uniform sample of ceil(fraction * size) graphs without replacement,
/// original order preserved.
GraphDataset subsample_training(const GraphDataset& train, double fraction, std::uint64_t seed);

/// Appends m = ceil(rate * n_normals / (1 - rate)) anomalous graphs drawn
/// without replacement from the pool, so anomalies make up ceil(rate *
/// result_size) of the result. All labels in the result are cleared to 0:
/// contaminated training data is unlabeled.
GraphDataset inject_contamination(const GraphDataset& train_normals,
                                  const GraphDataset& anomaly_pool, double rate,
                                  std::uint64_t seed);

/// Canonical self-describing text snapshot; byte-stable and exact under
/// round-trip (doubles printed with 17 significant digits).
void write_snapshot(std::ostream& out, const GraphDataset& ds);
void write_snapshot(const std::filesystem::path& path, const GraphDataset& ds);
GraphDataset read_snapshot(std::istream& in);
GraphDataset read_snapshot(const std::filesystem::path& path);

/// Largest node degree over the dataset; 0 for an edgeless dataset.
int max_degree(const GraphDataset& ds);

}  // namespace glocalkd
