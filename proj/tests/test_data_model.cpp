#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spr/data.hpp"
#include "spr/errors.hpp"
#include "spr/graph.hpp"
#include "spr/rng.hpp"

using namespace spr;

namespace {

RawTable tiny_table(int n) {
  RawTable t;
  for (int i = 0; i < n; ++i) t.y.push_back(1.0 + i);
  t.x_cols = {{}};
  t.x_names = {"x_0"};
  for (int i = 0; i < n; ++i) t.x_cols[0].push_back(i % 3);
  return t;
}

}  // namespace

TEST_CASE("validate_dataset accepts a minimal valid input") {
  const auto ds = validate_dataset(tiny_table(3), path_graph(3), ResponseKind::gaussian);
  CHECK(ds.n() == 3);
  CHECK(ds.n_covariates() == 1);
  CHECK(ds.n_categories[0] == 3);
  CHECK(ds.n_fixed_effects() == 0);
}

TEST_CASE("validate_dataset rejects row count vs graph mismatch") {
  CHECK_THROWS_AS(validate_dataset(tiny_table(4), path_graph(3), ResponseKind::gaussian),
                  InputError);
}

TEST_CASE("validate_dataset rejects a zero Poisson offset") {
  RawTable t = tiny_table(3);
  t.y = {0.0, 2.0, 1.0};
  t.offsets = {1.0, 0.0, 2.0};
  CHECK_THROWS_AS(validate_dataset(t, path_graph(3), ResponseKind::poisson), InputError);
}

TEST_CASE("validate_dataset requires offsets for Poisson and rejects them for Gaussian") {
  RawTable t = tiny_table(3);
  t.y = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(validate_dataset(t, path_graph(3), ResponseKind::poisson), InputError);
  t.offsets = {1.0, 1.0, 1.0};
  CHECK_NOTHROW(validate_dataset(t, path_graph(3), ResponseKind::poisson));
  t.y = tiny_table(3).y;
  CHECK_THROWS_AS(validate_dataset(t, path_graph(3), ResponseKind::gaussian), InputError);
}

TEST_CASE("validate_dataset rejects out-of-range declared categories") {
  CHECK_THROWS_AS(
      validate_dataset(tiny_table(3), path_graph(3), ResponseKind::gaussian, {2}),
      InputError);
}

TEST_CASE("quintiles of 1..10 follow uniform ranks") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(quintile_discretize(v) == std::vector<int>{0, 0, 1, 1, 2, 2, 3, 3, 4, 4});
}

TEST_CASE("constant vector lands entirely in the lowest quintile") {
  CHECK(quintile_discretize({5, 5, 5, 5, 5}) == std::vector<int>{0, 0, 0, 0, 0});
}

TEST_CASE("quintile counts match a sort-and-split oracle on a normal sample") {
  Rng rng(11);
  std::vector<double> v(1000);
  for (auto& x : v) x = rng.normal();
  const auto codes = quintile_discretize(v);
  std::vector<int> counts(5, 0);
  for (int c : codes) ++counts[c];
  for (int q = 0; q < 5; ++q) CHECK(std::abs(counts[q] - 200) <= 1);

  // oracle: sort a copy and split into consecutive blocks of 200
  std::vector<int> order(1000);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
  for (int r = 0; r < 1000; ++r) CHECK(codes[order[r]] == r / 200);
}

TEST_CASE("quintile rejects short or non-finite input") {
  CHECK_THROWS_AS(quintile_discretize({1, 2, 3, 4}), InputError);
  CHECK_THROWS_AS(quintile_discretize({1, 2, 3, 4, std::nan("")}), InputError);
}

TEST_CASE("quintile_discretize is monotone") {
  Rng rng(12);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(40);
    for (auto& x : v) x = std::round(rng.normal() * 3.0);  // force ties
    const auto codes = quintile_discretize(v);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j)
        if (v[i] <= v[j]) CHECK(codes[i] <= codes[j]);
  }
}

TEST_CASE("build_graph on a path") {
  const auto g = build_graph(3, {{0, 1}, {1, 2}});
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.n_components() == 1);
}

TEST_CASE("duplicate and reversed edges collapse to one") {
  const auto g = build_graph(2, {{0, 1}, {1, 0}, {0, 1}});
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
  CHECK(g.edges().size() == 1);
}

TEST_CASE("2x2 rook grid has degree 2 everywhere") {
  const auto g = grid_graph(2, 2);
  for (int i = 0; i < 4; ++i) CHECK(g.degree(i) == 2);
}

TEST_CASE("build_graph rejects self-loops and bad indices") {
  CHECK_THROWS_AS(build_graph(3, {{1, 1}}), InputError);
  CHECK_THROWS_AS(build_graph(3, {{0, 3}}), InputError);
  CHECK_THROWS_AS(build_graph(3, {{-1, 0}}), InputError);
}

TEST_CASE("isolated nodes are permitted and reported") {
  const auto g = build_graph(4, {{0, 1}});
  CHECK(g.isolated_nodes() == std::vector<int>{2, 3});
  CHECK(g.n_components() == 3);
  CHECK(g.icar_rank() == 1);
}

TEST_CASE("build_graph symmetry holds for random edge lists") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rng.uniform_int(20);
    std::vector<std::pair<int, int>> edges;
    const int m = rng.uniform_int(40);
    for (int e = 0; e < m; ++e) {
      const int a = rng.uniform_int(n);
      int b = rng.uniform_int(n - 1);
      if (b >= a) ++b;
      edges.emplace_back(a, b);
    }
    const auto g = build_graph(n, edges);
    for (int i = 0; i < n; ++i) {
      CHECK(g.degree(i) == static_cast<int>(g.adjacency[i].size()));
      for (int j : g.adjacency[i]) {
        CHECK(i != j);
        CHECK(std::binary_search(g.adjacency[j].begin(), g.adjacency[j].end(), i));
      }
    }
  }
}

TEST_CASE("validation is invariant under consistent row permutation") {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 5 + rng.uniform_int(10);
    RawTable t;
    for (int i = 0; i < n; ++i) {
      t.y.push_back(rng.normal());
    }
    t.x_cols = {{}, {}};
    t.x_names = {"x_0", "x_1"};
    for (int i = 0; i < n; ++i) {
      t.x_cols[0].push_back(rng.uniform_int(4));
      t.x_cols[1].push_back(rng.uniform_int(3));
    }
    const bool corrupt = rep % 3 == 0;
    if (corrupt) t.x_cols[1][rng.uniform_int(n)] = -2;  // invalid code

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    auto graph = build_graph(n, edges);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);

    RawTable pt;
    pt.x_cols = {{}, {}};
    pt.x_names = t.x_names;
    std::vector<int> inv(n);
    for (int i = 0; i < n; ++i) inv[perm[i]] = i;
    for (int i = 0; i < n; ++i) {
      pt.y.push_back(t.y[perm[i]]);
      pt.x_cols[0].push_back(t.x_cols[0][perm[i]]);
      pt.x_cols[1].push_back(t.x_cols[1][perm[i]]);
    }
    std::vector<std::pair<int, int>> pedges;
    for (const auto& [a, b] : edges) pedges.emplace_back(inv[a], inv[b]);
    auto pgraph = build_graph(n, pedges);

    bool ok_orig = true, ok_perm = true;
    try {
      validate_dataset(t, graph, ResponseKind::gaussian);
    } catch (const InputError&) {
      ok_orig = false;
    }
    try {
      validate_dataset(pt, pgraph, ResponseKind::gaussian);
    } catch (const InputError&) {
      ok_perm = false;
    }
    CHECK(ok_orig == ok_perm);
    CHECK(ok_orig == !corrupt);
  }
}
