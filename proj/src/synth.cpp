#include "glocalkd/synth.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "glocalkd/errors.hpp"
#include "glocalkd/rng.hpp"

namespace glocalkd {

using json = nlohmann::json;

std::string to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::none: return "none";
    case AnomalyKind::global_clique: return "global-clique";
    case AnomalyKind::global_scale: return "global-scale";
    case AnomalyKind::local_feature: return "local-feature";
    case AnomalyKind::local_motif: return "local-motif";
    case AnomalyKind::local_category: return "local-category";
  }
  return "none";
}

AnomalyKind anomaly_kind_from_string(const std::string& s) {
  if (s == "none") return AnomalyKind::none;
  if (s == "global-clique") return AnomalyKind::global_clique;
  if (s == "global-scale") return AnomalyKind::global_scale;
  if (s == "local-feature") return AnomalyKind::local_feature;
  if (s == "local-motif") return AnomalyKind::local_motif;
  if (s == "local-category") return AnomalyKind::local_category;
  throw InputError("unknown anomaly kind: " + s);
}

std::string to_string(FeatureFamily family) {
  return family == FeatureFamily::gaussian ? "gaussian" : "categorical";
}

FeatureFamily feature_family_from_string(const std::string& s) {
  if (s == "gaussian") return FeatureFamily::gaussian;
  if (s == "categorical") return FeatureFamily::categorical;
  throw InputError("unknown feature family: " + s);
}

void validate(const SynthSpec& spec) {
  if (spec.normal_count < 1) throw InputError("spec needs at least one normal graph");
  if (spec.anomaly_count < 0) throw InputError("negative anomaly count");
  if (spec.anomaly_count > 0 && spec.anomaly_kind == AnomalyKind::none) {
    throw InputError("anomaly_count > 0 requires an anomaly kind");
  }
  if (spec.nodes_min < 2 || spec.nodes_max < spec.nodes_min) {
    throw InputError("node range must satisfy 2 <= nodes_min <= nodes_max");
  }
  if (spec.feature_dim < 0) throw InputError("negative feature dimension");
  if (spec.feature_dim > 0 && spec.feature_family == FeatureFamily::gaussian &&
      spec.feature_noise <= 0.0) {
    throw InputError("gaussian features need feature_noise > 0");
  }
  if (spec.spike_prob < 0.0 || spec.spike_prob >= 1.0) {
    throw InputError("spike_prob must be in [0, 1)");
  }
  if (spec.feature_family == FeatureFamily::categorical) {
    if (spec.feature_dim < 1) throw InputError("categorical features need feature_dim > 0");
    if (spec.normal_categories < 1 || spec.normal_categories > spec.feature_dim) {
      throw InputError("normal_categories must be in [1, feature_dim]");
    }
    if (spec.beacon_count < 0 || spec.beacon_count >= spec.nodes_min) {
      throw InputError("beacon_count must be in [0, nodes_min)");
    }
  }
  switch (spec.anomaly_kind) {
    case AnomalyKind::local_feature:
      if (spec.feature_dim == 0 || spec.feature_family != FeatureFamily::gaussian) {
        throw InputError("local-feature anomalies need gaussian features");
      }
      break;
    case AnomalyKind::local_category:
      if (spec.feature_family != FeatureFamily::categorical) {
        throw InputError("local-category anomalies need categorical features");
      }
      if (spec.normal_categories >= spec.feature_dim) {
        throw InputError("local-category anomalies need held-out categories");
      }
      if (spec.rare_count < 1 ||
          spec.rare_count + spec.beacon_count > spec.nodes_min) {
        throw InputError("rare_count must fit in the smallest graph");
      }
      break;
    case AnomalyKind::local_motif:
      if (spec.motif_size < 3) throw InputError("motif_size must be at least 3");
      break;
    case AnomalyKind::global_clique:
      if (spec.clique_density <= 0.0 || spec.clique_density > 1.0) {
        throw InputError("clique_density must be in (0, 1]");
      }
      break;
    case AnomalyKind::global_scale:
      if (spec.anomaly_nodes_min < 2 || spec.anomaly_nodes_max < spec.anomaly_nodes_min) {
        throw InputError("anomaly node range must satisfy 2 <= min <= max");
      }
      if (spec.anomaly_feature_scale <= 0.0) {
        throw InputError("anomaly_feature_scale must be positive");
      }
      if (spec.feature_dim > 0 && spec.feature_family != FeatureFamily::gaussian) {
        throw InputError("global-scale anomalies need gaussian features");
      }
      break;
    case AnomalyKind::none:
      break;
  }
}

namespace {

// Random recursive tree: node i > 0 attaches to a uniform earlier node.
std::vector<std::pair<int, int>> random_tree_edges(int n, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  for (int i = 1; i < n; ++i) edges.emplace_back(rng.below_int(i), i);
  return edges;
}

double gaussian_draw(const SynthSpec& spec, Rng& rng) {
  const double z = rng.gaussian();
  const bool spike = spec.spike_prob > 0.0 && rng.uniform() < spec.spike_prob;
  return spike ? spec.spike_scale * z : z;
}

Matrix gaussian_rows(int n, const SynthSpec& spec, double scale, Rng& rng) {
  Matrix x(n, spec.feature_dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.feature_dim; ++j) {
      x(i, j) = spec.prototype_value + scale * spec.feature_noise * gaussian_draw(spec, rng);
    }
  }
  return x;
}

// One-hot rows: rare_count held-out-category nodes, then beacon_count fixed
// strong rows, then in-vocabulary nodes, at shuffled positions.
Matrix categorical_rows(int n, int rare_count, const SynthSpec& spec, Rng& rng) {
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[i] = i;
  rng.shuffle(position);

  Matrix x = Matrix::Zero(n, spec.feature_dim);
  for (int slot = 0; slot < n; ++slot) {
    const int row = position[slot];
    if (slot < rare_count) {
      const int held_out = spec.feature_dim - spec.normal_categories;
      x(row, spec.normal_categories + rng.below_int(held_out)) =
          std::abs(rng.gaussian()) + 0.5;
    } else if (slot < rare_count + spec.beacon_count) {
      x(row, rng.below_int(spec.normal_categories)) = spec.beacon_value;
    } else {
      x(row, rng.below_int(spec.normal_categories)) = std::abs(rng.gaussian()) + 0.5;
    }
  }
  return x;
}

std::optional<Matrix> normal_features(int n, const SynthSpec& spec, Rng& rng) {
  if (spec.feature_dim == 0) return std::nullopt;
  if (spec.feature_family == FeatureFamily::categorical) {
    return categorical_rows(n, 0, spec, rng);
  }
  return gaussian_rows(n, spec, 1.0, rng);
}

int draw_size(int lo, int hi, Rng& rng) { return lo + rng.below_int(hi - lo + 1); }

Graph make_normal(const SynthSpec& spec, Rng& rng) {
  const int n = draw_size(spec.nodes_min, spec.nodes_max, rng);
  return build_graph(n, random_tree_edges(n, rng), normal_features(n, spec, rng));
}

Graph make_global_clique(const SynthSpec& spec, Rng& rng) {
  const int n = draw_size(spec.nodes_min, spec.nodes_max, rng);
  std::vector<std::pair<int, int>> all_pairs;
  all_pairs.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) all_pairs.emplace_back(i, j);
  }
  rng.shuffle(all_pairs);
  // Exact edge count, so the density is spec.clique_density by construction.
  const int keep = static_cast<int>(std::ceil(spec.clique_density * all_pairs.size() - 1e-9));
  all_pairs.resize(std::max(keep, 1));
  return build_graph(n, all_pairs, normal_features(n, spec, rng));
}

Graph make_global_scale(const SynthSpec& spec, Rng& rng) {
  const int n = draw_size(spec.anomaly_nodes_min, spec.anomaly_nodes_max, rng);
  std::optional<Matrix> features;
  if (spec.feature_dim > 0) features = gaussian_rows(n, spec, spec.anomaly_feature_scale, rng);
  return build_graph(n, random_tree_edges(n, rng), std::move(features));
}

Graph make_local_feature(const SynthSpec& spec, Rng& rng) {
  const int n = draw_size(spec.nodes_min, spec.nodes_max, rng);
  auto edges = random_tree_edges(n, rng);
  Matrix x = gaussian_rows(n, spec, 1.0, rng);
  const int outlier = rng.below_int(n);
  x.row(outlier).setConstant(spec.prototype_value +
                             spec.outlier_shift * spec.feature_noise);
  return build_graph(n, edges, std::move(x));
}

Graph make_local_motif(const SynthSpec& spec, Rng& rng) {
  const int base = draw_size(spec.nodes_min, spec.nodes_max, rng);
  auto edges = random_tree_edges(base, rng);
  const int n = base + spec.motif_size;
  const int anchor = rng.below_int(base);
  for (int i = base; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  edges.emplace_back(anchor, base);
  return build_graph(n, edges, normal_features(n, spec, rng));
}

Graph make_local_category(const SynthSpec& spec, Rng& rng) {
  const int n = draw_size(spec.nodes_min, spec.nodes_max, rng);
  auto edges = random_tree_edges(n, rng);
  return build_graph(n, edges, categorical_rows(n, spec.rare_count, spec, rng));
}

}  // namespace

GraphDataset synth_corpus(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  GraphDataset ds;
  ds.name = spec.name;
  ds.feature_kind = spec.feature_dim > 0 ? FeatureKind::attributed : FeatureKind::degree_one_hot;
  ds.graphs.reserve(spec.normal_count + spec.anomaly_count);

  for (int i = 0; i < spec.normal_count; ++i) {
    ds.graphs.push_back(make_normal(spec, rng));
    ds.labels.push_back(0);
  }
  for (int i = 0; i < spec.anomaly_count; ++i) {
    switch (spec.anomaly_kind) {
      case AnomalyKind::global_clique: ds.graphs.push_back(make_global_clique(spec, rng)); break;
      case AnomalyKind::global_scale: ds.graphs.push_back(make_global_scale(spec, rng)); break;
      case AnomalyKind::local_feature: ds.graphs.push_back(make_local_feature(spec, rng)); break;
      case AnomalyKind::local_motif: ds.graphs.push_back(make_local_motif(spec, rng)); break;
      case AnomalyKind::local_category: ds.graphs.push_back(make_local_category(spec, rng)); break;
      case AnomalyKind::none: break;
    }
    ds.labels.push_back(1);
  }
  for (int i = 0; i < ds.size(); ++i) ds.graphs[i].label = ds.labels[i];
  return ds;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("bad synth spec " + path.string() + ": " + e.what());
  }

  SynthSpec spec;
  try {
    spec.name = j.value("name", spec.name);
    spec.normal_count = j.value("normal_count", spec.normal_count);
    spec.anomaly_count = j.value("anomaly_count", spec.anomaly_count);
    if (j.contains("anomaly_kind")) {
      spec.anomaly_kind = anomaly_kind_from_string(j["anomaly_kind"].get<std::string>());
    }
    spec.nodes_min = j.value("nodes_min", spec.nodes_min);
    spec.nodes_max = j.value("nodes_max", spec.nodes_max);
    spec.feature_dim = j.value("feature_dim", spec.feature_dim);
    if (j.contains("feature_family")) {
      spec.feature_family = feature_family_from_string(j["feature_family"].get<std::string>());
    }
    spec.feature_noise = j.value("feature_noise", spec.feature_noise);
    spec.prototype_value = j.value("prototype_value", spec.prototype_value);
    spec.spike_prob = j.value("spike_prob", spec.spike_prob);
    spec.spike_scale = j.value("spike_scale", spec.spike_scale);
    spec.normal_categories = j.value("normal_categories", spec.normal_categories);
    spec.beacon_count = j.value("beacon_count", spec.beacon_count);
    spec.beacon_value = j.value("beacon_value", spec.beacon_value);
    spec.outlier_shift = j.value("outlier_shift", spec.outlier_shift);
    spec.clique_density = j.value("clique_density", spec.clique_density);
    spec.motif_size = j.value("motif_size", spec.motif_size);
    spec.anomaly_nodes_min = j.value("anomaly_nodes_min", spec.anomaly_nodes_min);
    spec.anomaly_nodes_max = j.value("anomaly_nodes_max", spec.anomaly_nodes_max);
    spec.anomaly_feature_scale = j.value("anomaly_feature_scale", spec.anomaly_feature_scale);
    spec.rare_count = j.value("rare_count", spec.rare_count);
  } catch (const json::exception& e) {
    throw InputError("bad synth spec " + path.string() + ": " + e.what());
  }
  validate(spec);
  return spec;
}

void save_synth_spec(const std::filesystem::path& path, const SynthSpec& spec) {
  json j{{"name", spec.name},
         {"normal_count", spec.normal_count},
         {"anomaly_count", spec.anomaly_count},
         {"anomaly_kind", to_string(spec.anomaly_kind)},
         {"nodes_min", spec.nodes_min},
         {"nodes_max", spec.nodes_max},
         {"feature_dim", spec.feature_dim},
         {"feature_family", to_string(spec.feature_family)},
         {"feature_noise", spec.feature_noise},
         {"prototype_value", spec.prototype_value},
         {"spike_prob", spec.spike_prob},
         {"spike_scale", spec.spike_scale},
         {"normal_categories", spec.normal_categories},
         {"beacon_count", spec.beacon_count},
         {"beacon_value", spec.beacon_value},
         {"outlier_shift", spec.outlier_shift},
         {"clique_density", spec.clique_density},
         {"motif_size", spec.motif_size},
         {"anomaly_nodes_min", spec.anomaly_nodes_min},
         {"anomaly_nodes_max", spec.anomaly_nodes_max},
         {"anomaly_feature_scale", spec.anomaly_feature_scale},
         {"rare_count", spec.rare_count}};
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace glocalkd
