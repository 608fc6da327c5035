#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glocalkd/errors.hpp"
#include "glocalkd/graph.hpp"
#include "glocalkd/rng.hpp"
#include "oracles.hpp"

using namespace glocalkd;

TEST_CASE("build_graph canonicalizes and validates") {
  const Graph minimal = build_graph(1, {});
  CHECK(minimal.num_nodes == 1);
  CHECK(minimal.edges.empty());

  const Graph dedup = build_graph(3, {{0, 1}, {1, 0}, {1, 2}});
  CHECK(dedup.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

  CHECK_THROWS_AS(build_graph(2, {{0, 2}}), InputError);
  CHECK_THROWS_AS(build_graph(2, {{1, 1}}), InputError);
  CHECK_THROWS_AS(build_graph(0, {}), InputError);
  CHECK_THROWS_AS(build_graph(3, {}, Matrix::Zero(2, 4)), InputError);
}

TEST_CASE("normalized adjacency closed forms") {
  const NormAdj single = normalized_adjacency(build_graph(1, {}));
  CHECK(single.rows() == 1);
  CHECK(single(0, 0) == doctest::Approx(1.0));

  const NormAdj pair = normalized_adjacency(build_graph(2, {{0, 1}}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(pair(i, j) == doctest::Approx(0.5));
}

TEST_CASE("normalized adjacency matches the dense entrywise oracle") {
  // path 0-1-2 plus random graphs, against (D+I)^-1/2 (A+I) (D+I)^-1/2
  Rng rng(7);
  std::vector<Graph> cases;
  cases.push_back(build_graph(3, {{0, 1}, {1, 2}}));
  for (int t = 0; t < 20; ++t) cases.push_back(oracles::random_graph(2 + rng.below_int(9), 0.3, rng));

  for (const Graph& g : cases) {
    const int n = g.num_nodes;
    Matrix a_plus_i = Matrix::Identity(n, n);
    for (auto [i, j] : g.edges) {
      a_plus_i(i, j) = 1.0;
      a_plus_i(j, i) = 1.0;
    }
    const NormAdj adj = normalized_adjacency(g);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double expected =
            a_plus_i(i, j) / std::sqrt(a_plus_i.row(i).sum() * a_plus_i.row(j).sum());
        CHECK(adj(i, j) == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("normalized adjacency is symmetric and permutation equivariant") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + rng.below_int(8);
    const Graph g = oracles::random_graph(n, 0.4, rng);
    const NormAdj adj = normalized_adjacency(g);
    CHECK((adj - adj.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < n; ++i) CHECK(adj(i, i) > 0.0);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::pair<int, int>> relabeled;
    for (auto [a, b] : g.edges) relabeled.emplace_back(perm[a], perm[b]);
    const NormAdj padj = normalized_adjacency(build_graph(n, relabeled));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(padj(perm[i], perm[j]) == doctest::Approx(adj(i, j)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("k-regular graphs normalize to 1/(k+1)") {
  // cycle on 6 nodes is 2-regular
  const Graph cycle = build_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
  const NormAdj adj = normalized_adjacency(cycle);
  for (int i = 0; i < 6; ++i) CHECK(adj(i, i) == doctest::Approx(1.0 / 3));
  for (auto [i, j] : cycle.edges) CHECK(adj(i, j) == doctest::Approx(1.0 / 3));
}

TEST_CASE("degree features one-hot encode clamped degrees") {
  const Graph isolated = build_graph(1, {});
  const Matrix iso = degree_features(isolated, 2);
  CHECK(iso.rows() == 1);
  CHECK(iso.cols() == 3);
  CHECK(iso(0, 0) == 1.0);
  CHECK(iso.row(0).sum() == 1.0);

  // center of a 3-star has degree 3
  const Graph star = build_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  const Matrix sf = degree_features(star, 3);
  CHECK(sf(0, 3) == 1.0);
  CHECK(sf(1, 1) == 1.0);

  // degree 5 clamps into the final bucket
  const Graph star5 = build_graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const Matrix cf = degree_features(star5, 3);
  CHECK(cf(0, 3) == 1.0);

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Graph g = oracles::random_graph(2 + rng.below_int(9), 0.5, rng);
    const Matrix x = degree_features(g, 4);
    for (int i = 0; i < x.rows(); ++i) CHECK(x.row(i).sum() == 1.0);
  }
}
