#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "glocalkd/errors.hpp"
#include "glocalkd/synth.hpp"

using namespace glocalkd;

TEST_CASE("degenerate spec yields a purely normal corpus of trees") {
  SynthSpec spec;
  spec.normal_count = 200;
  spec.anomaly_count = 0;
  spec.anomaly_kind = AnomalyKind::none;
  spec.nodes_min = 10;
  spec.nodes_max = 20;
  const GraphDataset ds = synth_corpus(spec, 1);
  CHECK(ds.size() == 200);
  CHECK(ds.count_label(1) == 0);
  for (const Graph& g : ds.graphs) {
    CHECK(g.num_nodes >= 10);
    CHECK(g.num_nodes <= 20);
    CHECK(g.num_edges() == g.num_nodes - 1);  // trees
  }
}

TEST_CASE("near-clique anomalies exceed density 0.8 by counting") {
  SynthSpec spec;
  spec.normal_count = 180;
  spec.anomaly_count = 20;
  spec.anomaly_kind = AnomalyKind::global_clique;
  spec.clique_density = 0.9;
  const GraphDataset ds = synth_corpus(spec, 2);
  int anomalies = 0;
  for (int i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] != 1) continue;
    ++anomalies;
    const Graph& g = ds.graphs[i];
    const double density = 2.0 * g.num_edges() / (g.num_nodes * (g.num_nodes - 1.0));
    CHECK(density > 0.8);
  }
  CHECK(anomalies == 20);
}

TEST_CASE("feature outliers produce exactly one row beyond the noise bound") {
  SynthSpec spec;
  spec.normal_count = 180;
  spec.anomaly_count = 20;
  spec.anomaly_kind = AnomalyKind::local_feature;
  spec.feature_dim = 4;
  spec.feature_noise = 0.1;
  spec.prototype_value = 1.0;
  spec.outlier_shift = 10.0;
  const GraphDataset ds = synth_corpus(spec, 3);

  // noise |z| stays below 5 by construction, so a 10-sigma row is unambiguous
  for (int i = 0; i < ds.size(); ++i) {
    const Matrix& x = *ds.graphs[i].features;
    int outlying = 0;
    for (int r = 0; r < x.rows(); ++r) {
      const double z = (x.row(r).array() - spec.prototype_value).abs().maxCoeff() /
                       spec.feature_noise;
      if (z > 5.0) ++outlying;
    }
    CHECK(outlying == (ds.labels[i] == 1 ? 1 : 0));
  }
}

TEST_CASE("attached motifs add a dense clique to a tree") {
  SynthSpec spec;
  spec.normal_count = 5;
  spec.anomaly_count = 5;
  spec.anomaly_kind = AnomalyKind::local_motif;
  spec.nodes_min = 10;
  spec.nodes_max = 14;
  spec.motif_size = 5;
  const GraphDataset ds = synth_corpus(spec, 4);
  for (int i = 0; i < ds.size(); ++i) {
    const Graph& g = ds.graphs[i];
    if (ds.labels[i] == 1) {
      CHECK(g.num_nodes >= 15);
      // tree edges + full motif + one anchor edge
      CHECK(g.num_edges() == (g.num_nodes - spec.motif_size - 1) + 10 + 1);
    } else {
      CHECK(g.num_edges() == g.num_nodes - 1);
    }
  }
}

TEST_CASE("synthesis is deterministic per seed") {
  SynthSpec spec;
  spec.normal_count = 30;
  spec.anomaly_count = 10;
  spec.anomaly_kind = AnomalyKind::global_clique;
  spec.feature_dim = 3;
  std::ostringstream a, b;
  write_snapshot(a, synth_corpus(spec, 99));
  write_snapshot(b, synth_corpus(spec, 99));
  CHECK(a.str() == b.str());
  std::ostringstream c;
  write_snapshot(c, synth_corpus(spec, 100));
  CHECK(a.str() != c.str());
}

TEST_CASE("invalid specs are rejected") {
  SynthSpec spec;
  spec.normal_count = 0;
  CHECK_THROWS_AS(validate(spec), InputError);

  spec = SynthSpec{};
  spec.anomaly_count = 5;
  spec.anomaly_kind = AnomalyKind::none;
  CHECK_THROWS_AS(validate(spec), InputError);

  spec = SynthSpec{};
  spec.anomaly_kind = AnomalyKind::local_feature;
  spec.feature_dim = 0;
  CHECK_THROWS_AS(validate(spec), InputError);

  spec = SynthSpec{};
  spec.nodes_min = 15;
  spec.nodes_max = 10;
  CHECK_THROWS_AS(validate(spec), InputError);

  spec = SynthSpec{};
  spec.clique_density = 0.0;
  CHECK_THROWS_AS(validate(spec), InputError);
}
