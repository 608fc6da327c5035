#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "glocalkd/dataset.hpp"
#include "glocalkd/errors.hpp"
#include "glocalkd/synth.hpp"

using namespace glocalkd;
namespace fs = std::filesystem;

namespace {

// Scratch benchmark directory in the standard multi-file layout.
struct BenchDir {
  fs::path dir;

  explicit BenchDir(const std::string& name) {
    dir = fs::temp_directory_path() / ("glocalkd_test_" + name + "_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~BenchDir() { fs::remove_all(dir); }

  void file(const std::string& suffix, const std::string& content) const {
    std::ofstream out(dir / ("DS_" + suffix));
    out << content;
  }
};

}  // namespace

TEST_CASE("parse_benchmark_dir reads the smallest well-formed corpus") {
  BenchDir bench("small");
  bench.file("A.txt", "1, 2\n2, 1\n");
  bench.file("graph_indicator.txt", "1\n1\n2\n");
  bench.file("graph_labels.txt", "0\n1\n");

  const GraphDataset ds = parse_benchmark_dir(bench.dir);
  CHECK(ds.name == "DS");
  CHECK(ds.size() == 2);
  CHECK(ds.graphs[0].num_nodes == 2);
  CHECK(ds.graphs[0].edges == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(ds.graphs[1].num_nodes == 1);
  CHECK(ds.graphs[1].edges.empty());
  CHECK(ds.labels == std::vector<int>{0, 1});
  CHECK(ds.feature_kind == FeatureKind::degree_one_hot);
}

TEST_CASE("parse_benchmark_dir rejects cross-graph edges and missing files") {
  BenchDir bench("bad");
  bench.file("A.txt", "1, 3\n");
  bench.file("graph_indicator.txt", "1\n1\n2\n");
  bench.file("graph_labels.txt", "0\n1\n");
  CHECK_THROWS_WITH_AS(parse_benchmark_dir(bench.dir),
                       doctest::Contains("crosses graphs"), InputError);

  BenchDir empty("empty");
  CHECK_THROWS_WITH_AS(parse_benchmark_dir(empty.dir), doctest::Contains("missing file"),
                       InputError);
}

TEST_CASE("parse_benchmark_dir loads attributes, preferring them over node labels") {
  BenchDir bench("attr");
  bench.file("A.txt", "1, 2\n2, 1\n");
  bench.file("graph_indicator.txt", "1\n1\n2\n");
  bench.file("graph_labels.txt", "0\n1\n");
  bench.file("node_attributes.txt", "0.5, 1.5\n-0.25, 2.0\n3.0, 4.0\n");
  bench.file("node_labels.txt", "0\n1\n2\n");

  const GraphDataset ds = parse_benchmark_dir(bench.dir);
  CHECK(ds.feature_kind == FeatureKind::attributed);
  CHECK(ds.feature_dim() == 2);
  CHECK((*ds.graphs[0].features)(1, 0) == -0.25);
  CHECK((*ds.graphs[1].features)(0, 1) == 4.0);
}

TEST_CASE("parse_benchmark_dir one-hot encodes node labels when attributes are absent") {
  BenchDir bench("nodelabels");
  bench.file("A.txt", "1, 2\n2, 1\n");
  bench.file("graph_indicator.txt", "1\n1\n1\n");
  bench.file("graph_labels.txt", "0\n");
  bench.file("node_labels.txt", "3\n5\n4\n");

  const GraphDataset ds = parse_benchmark_dir(bench.dir);
  CHECK(ds.feature_dim() == 3);
  CHECK((*ds.graphs[0].features)(0, 0) == 1.0);
  CHECK((*ds.graphs[0].features)(1, 2) == 1.0);
  CHECK((*ds.graphs[0].features)(2, 1) == 1.0);
}

TEST_CASE("parse_benchmark_dir flags ragged attribute rows") {
  BenchDir bench("ragged");
  bench.file("A.txt", "");
  bench.file("graph_indicator.txt", "1\n1\n");
  bench.file("graph_labels.txt", "0\n");
  bench.file("node_attributes.txt", "1.0, 2.0\n3.0\n");
  CHECK_THROWS_WITH_AS(parse_benchmark_dir(bench.dir), doctest::Contains("ragged"), InputError);
}

TEST_CASE("to_anomaly_labels marks the minority class, with overrides and tie-breaks") {
  GraphDataset ds;
  ds.name = "t";
  for (int i = 0; i < 4; ++i) ds.graphs.push_back(build_graph(1, {}));

  ds.labels = {0, 0, 0, 1};
  CHECK(to_anomaly_labels(ds).labels == std::vector<int>{0, 0, 0, 1});

  GraphDataset five = ds;
  five.graphs.push_back(build_graph(1, {}));
  five.labels = {2, 2, 1, 1, 1};
  CHECK(to_anomaly_labels(five, 2).labels == std::vector<int>{1, 1, 0, 0, 0});
  CHECK_THROWS_AS(to_anomaly_labels(five, 9), InputError);

  ds.labels = {0, 0, 1, 1};
  CHECK(to_anomaly_labels(ds).labels == std::vector<int>{1, 1, 0, 0});

  // structure untouched
  const GraphDataset converted = to_anomaly_labels(ds);
  for (int i = 0; i < ds.size(); ++i) {
    CHECK(converted.graphs[i].num_nodes == ds.graphs[i].num_nodes);
    CHECK(converted.graphs[i].edges == ds.graphs[i].edges);
  }
}

namespace {

GraphDataset toy_dataset(int normals, int anomalies) {
  GraphDataset ds;
  ds.name = "toy";
  for (int i = 0; i < normals + anomalies; ++i) {
    ds.graphs.push_back(build_graph(2, {{0, 1}}));
    ds.labels.push_back(i < normals ? 0 : 1);
  }
  return ds;
}

}  // namespace

TEST_CASE("stratified_kfold balances folds per class") {
  const GraphDataset ds = toy_dataset(8, 2);
  const FoldPlan plan = stratified_kfold(ds, 5, 42);

  std::vector<int> sizes(5, 0);
  std::vector<std::set<int>> anomaly_folds;
  std::set<int> afolds;
  for (int i = 0; i < ds.size(); ++i) {
    REQUIRE(plan.assignments[i] >= 0);
    REQUIRE(plan.assignments[i] < 5);
    ++sizes[plan.assignments[i]];
    if (ds.labels[i] == 1) afolds.insert(plan.assignments[i]);
  }
  for (int s : sizes) CHECK(s == 2);
  CHECK(afolds.size() == 2);  // the two anomalies land in distinct folds

  const FoldPlan again = stratified_kfold(ds, 5, 42);
  CHECK(plan.assignments == again.assignments);
  const FoldPlan other = stratified_kfold(ds, 5, 43);
  CHECK(plan.assignments != other.assignments);

  CHECK_THROWS_AS(stratified_kfold(ds, 1, 0), ConfigError);
  CHECK_THROWS_AS(stratified_kfold(ds, 11, 0), ConfigError);
}

TEST_CASE("stratified_kfold keeps per-fold class counts within one of proportional") {
  const GraphDataset ds = toy_dataset(33, 14);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int k = 5;
    const FoldPlan plan = stratified_kfold(ds, k, seed);
    std::vector<int> pos(k, 0), neg(k, 0);
    for (int i = 0; i < ds.size(); ++i) {
      (ds.labels[i] == 1 ? pos : neg)[plan.assignments[i]]++;
    }
    for (int f = 0; f < k; ++f) {
      CHECK(std::abs(pos[f] - 14.0 / k) <= 1.0);
      CHECK(std::abs(neg[f] - 33.0 / k) <= 1.0);
    }
  }
}

TEST_CASE("select_fold partitions the dataset and can drop anomalies") {
  const GraphDataset ds = toy_dataset(8, 2);
  const FoldPlan plan = stratified_kfold(ds, 5, 1);
  int total = 0;
  for (int f = 0; f < 5; ++f) total += select_fold(ds, plan, f, true).size();
  CHECK(total == ds.size());

  const GraphDataset train = select_fold(ds, plan, 0, false, /*normals_only=*/true);
  CHECK(train.count_label(1) == 0);
}

TEST_CASE("subsample_training floors, preserves order, and is deterministic") {
  const GraphDataset ds = toy_dataset(100, 0);
  const GraphDataset all = subsample_training(ds, 1.0, 7);
  CHECK(all.size() == 100);

  const GraphDataset tiny = subsample_training(ds, 0.05, 7);
  CHECK(tiny.size() == 5);
  const GraphDataset tiny2 = subsample_training(ds, 0.05, 7);
  CHECK(tiny2.size() == 5);

  CHECK_THROWS_AS(subsample_training(ds, 0.0, 7), ConfigError);
  CHECK_THROWS_AS(subsample_training(ds, 1.5, 7), ConfigError);
}

TEST_CASE("inject_contamination hits the requested anomaly share") {
  const GraphDataset normals = toy_dataset(84, 0);
  GraphDataset pool = toy_dataset(0, 40);

  const GraphDataset untouched = inject_contamination(normals, pool, 0.0, 3);
  CHECK(untouched.size() == 84);

  const GraphDataset contaminated = inject_contamination(normals, pool, 0.16, 3);
  CHECK(contaminated.size() == 100);  // m/(84+m) = 0.16 solves to m = 16
  CHECK(contaminated.count_label(0) == 100);  // labels are hidden

  GraphDataset small_pool = toy_dataset(0, 1);
  CHECK_THROWS_AS(inject_contamination(toy_dataset(99, 0), small_pool, 0.5, 3), InputError);
}

TEST_CASE("parsing AIDS reproduces the published corpus statistics") {
  // runs only when the benchmark is on disk (./data or GLOCALKD_DATA_DIR)
  std::vector<fs::path> roots = {"data", "../data"};
  if (const char* env = std::getenv("GLOCALKD_DATA_DIR")) roots.emplace_back(env);
  fs::path dir;
  for (const fs::path& root : roots) {
    if (fs::exists(root / "AIDS" / "AIDS_A.txt")) dir = root / "AIDS";
  }
  if (dir.empty()) return;

  const GraphDataset ds = parse_benchmark_dir(dir);
  CHECK(ds.size() == 2000);
  double nodes = 0;
  for (const Graph& g : ds.graphs) nodes += g.num_nodes;
  CHECK(nodes / ds.size() == doctest::Approx(15.69).epsilon(0.01));
}

TEST_CASE("snapshots round-trip byte-identically") {
  SynthSpec spec;
  spec.normal_count = 12;
  spec.anomaly_count = 3;
  spec.anomaly_kind = AnomalyKind::global_clique;
  spec.feature_dim = 3;
  spec.prototype_value = 1.0 / 3.0;  // awkward doubles must survive
  const GraphDataset ds = synth_corpus(spec, 31337);

  std::ostringstream first;
  write_snapshot(first, ds);
  std::istringstream reread(first.str());
  const GraphDataset back = read_snapshot(reread);
  std::ostringstream second;
  write_snapshot(second, back);
  CHECK(first.str() == second.str());

  REQUIRE(back.size() == ds.size());
  CHECK(back.labels == ds.labels);
  for (int i = 0; i < ds.size(); ++i) {
    CHECK(back.graphs[i].edges == ds.graphs[i].edges);
    if (ds.graphs[i].has_features()) {
      CHECK(*back.graphs[i].features == *ds.graphs[i].features);
    }
  }
}
