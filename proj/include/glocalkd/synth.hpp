#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "glocalkd/dataset.hpp"

namespace glocalkd {

enum class AnomalyKind {
  none,            // degenerate: no anomalies
  global_clique,   // whole-graph family change: near-clique instead of tree
  global_scale,    // holistic change: much larger trees with dispersed features
  local_feature,   // one node with an outlying feature row
  local_motif,     // a dense motif attached to one tree node
  local_category,  // a few nodes drawn from held-out feature categories
};

enum class FeatureFamily {
  gaussian,     // rows near a prototype with bounded approximate-normal noise
  categorical,  // one-hot category rows with per-node magnitudes
};

std::string to_string(AnomalyKind kind);
AnomalyKind anomaly_kind_from_string(const std::string& s);
std::string to_string(FeatureFamily family);
FeatureFamily feature_family_from_string(const std::string& s);

/// Recipe for a labeled synthetic corpus: random trees as the normal family
/// plus one anomaly injector.
///
/// Gaussian features are prototype_value + feature_noise * z with z an
/// approximate gaussian of bounded support (|z| < 4.9), so an outlier_shift
/// of 10 noise units is always separable row-wise; spike_prob mixes in a
/// spike_scale-times-wider component for heavier (still bounded) tails.
/// Categorical features are one-hot rows over feature_dim categories:
/// normal nodes use the first normal_categories, beacon_count nodes per
/// graph carry a fixed beacon_value magnitude, and local_category anomalies
/// place rare_count nodes on the held-out categories.
struct SynthSpec {
  std::string name = "synth";
  int normal_count = 180;
  int anomaly_count = 20;
  AnomalyKind anomaly_kind = AnomalyKind::global_clique;
  int nodes_min = 10;
  int nodes_max = 20;

  int feature_dim = 0;  // 0 = plain graphs
  FeatureFamily feature_family = FeatureFamily::gaussian;
  double feature_noise = 0.1;
  double prototype_value = 1.0;
  double spike_prob = 0.0;
  double spike_scale = 3.0;
  int normal_categories = 6;
  int beacon_count = 2;
  double beacon_value = 6.0;

  double outlier_shift = 10.0;    // local_feature, in units of feature_noise
  double clique_density = 0.9;    // global_clique fraction of pairs kept
  int motif_size = 5;             // local_motif clique size
  int anomaly_nodes_min = 80;     // global_scale anomaly size range
  int anomaly_nodes_max = 120;
  double anomaly_feature_scale = 1.35;  // global_scale feature dispersion
  int rare_count = 5;             // local_category held-out nodes per anomaly
};

/// Throws InputError when the spec is inconsistent.
void validate(const SynthSpec& spec);

/// Deterministic labeled corpus: normal_count trees (label 0) followed by
/// anomaly_count injected anomalies (label 1).
GraphDataset synth_corpus(const SynthSpec& spec, std::uint64_t seed);

/// JSON spec file with the same field names as SynthSpec; absent fields
/// keep their defaults.
SynthSpec load_synth_spec(const std::filesystem::path& path);
void save_synth_spec(const std::filesystem::path& path, const SynthSpec& spec);

}  // namespace glocalkd
