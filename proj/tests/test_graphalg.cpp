#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "irg/graphalg.hpp"
#include "oracles.hpp"

using namespace irg;

namespace {

SampledGraph graph_from(std::uint32_t n,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  return SampledGraph::from_edges(n, std::move(edges), TypeAssignment{}, Provenance{});
}

SampledGraph random_graph(std::uint32_t n, double density, rng::Engine& eng) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (rng::uniform01(eng) < density) edges.emplace_back(i, j);
    }
  }
  return graph_from(n, std::move(edges));
}

SampledGraph random_tree(std::uint32_t n, rng::Engine& eng) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 1; v < n; ++v) {
    edges.emplace_back(static_cast<std::uint32_t>(rng::uniform_below(eng, v)), v);
  }
  return graph_from(n, std::move(edges));
}

}  // namespace

TEST_CASE("bfs distances") {
  const auto single = graph_from(1, {});
  CHECK(bfs_distances(single, 0) == std::vector<std::uint32_t>{0});

  const auto path = graph_from(3, {{0, 1}, {1, 2}});
  CHECK(bfs_distances(path, 0) == std::vector<std::uint32_t>{0, 1, 2});

  const auto split = graph_from(2, {});
  const auto d = bfs_distances(split, 0);
  CHECK(d[0] == 0);
  CHECK(d[1] == kDistInf);

  CHECK_THROWS(bfs_distances(split, 2));
}

TEST_CASE("connectivity") {
  const auto full = graph_from(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const auto c1 = connected(full);
  CHECK(c1.connected);
  CHECK(c1.component_sizes == std::vector<std::uint64_t>{4});

  const auto empty = graph_from(3, {});
  const auto c2 = connected(empty);
  CHECK_FALSE(c2.connected);
  CHECK(c2.component_sizes == std::vector<std::uint64_t>{1, 1, 1});

  const auto triangles = graph_from(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const auto c3 = connected(triangles);
  CHECK_FALSE(c3.connected);
  CHECK(c3.component_sizes == std::vector<std::uint64_t>{3, 3});
}

TEST_CASE("exact diameter examples") {
  const auto cycle5 = graph_from(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  CHECK(exact_diameter(cycle5).diameter == HopCount(2));

  const auto path4 = graph_from(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(exact_diameter(path4).diameter == HopCount(3));

  CHECK(exact_diameter(graph_from(3, {{0, 1}})).diameter.is_infinite());
  CHECK(exact_diameter(graph_from(1, {})).diameter == HopCount(0));
}

TEST_CASE("exact diameter equals the all-pairs oracle on random graphs") {
  auto eng = rng::make_engine(41);
  for (int trial = 0; trial < 120; ++trial) {
    const auto n = static_cast<std::uint32_t>(5 + rng::uniform_below(eng, 196));
    const double density = 0.005 + 0.06 * rng::uniform01(eng);
    const auto g = random_graph(n, density, eng);
    CHECK(exact_diameter(g).diameter == oracles::diameter_all_pairs(g));
  }
}

TEST_CASE("exact diameter on trees and eccentricity sanity") {
  auto eng = rng::make_engine(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::uint32_t>(2 + rng::uniform_below(eng, 150));
    const auto tree = random_tree(n, eng);
    const auto res = exact_diameter(tree);
    CHECK(res.diameter == oracles::diameter_all_pairs(tree));
  }
  // The diameter dominates eccentricities from random sources.
  const auto g = random_graph(150, 0.04, eng);
  const auto res = exact_diameter(g);
  if (res.diameter.is_finite()) {
    for (int i = 0; i < 10; ++i) {
      const auto src = static_cast<std::uint32_t>(rng::uniform_below(eng, 150));
      const auto dist = bfs_distances(g, src);
      std::uint64_t ecc = 0;
      for (auto d : dist) {
        if (d != kDistInf) ecc = std::max<std::uint64_t>(ecc, d);
      }
      CHECK(res.diameter >= HopCount(ecc));
    }
  }
}

TEST_CASE("expansion trace basics") {
  // Dense one-cell graph: the first layer picks up everyone else.
  const auto c1 = Kernel::constant(TypeSpace::finite({1.0}), 1.0);
  const auto g = sample_graph(c1, {40, 1.0, 3, std::nullopt, 1});
  const auto cells = Partition::blocks_of(c1);
  const auto tr = expansion_trace(g, c1, cells, {0, 0}, 7, 2, 5.0, 77);
  REQUIRE(tr.gamma_sizes.size() == 2);
  CHECK(tr.gamma_sizes[0] == 1);   // the start vertex alone
  CHECK(tr.gamma_sizes[1] == 39);  // everyone else in one hop
  CHECK(tr.gamma_prime_sizes[0] == 1);
  CHECK(tr.gamma_prime_sizes[1] == 20);  // truncated to half the cell
  CHECK(tr.t.size() == 2);
  CHECK(tr.t[0] == 0);
  CHECK(tr.bound_satisfied[0] == 1);
  CHECK(tr.all_satisfied());

  // Walk length 0 always satisfies its single bound.
  const auto tr0 = expansion_trace(g, c1, cells, {0}, 2, 2, 2.0, 77);
  CHECK(tr0.gamma_sizes == std::vector<std::uint64_t>{1});
  CHECK(tr0.all_satisfied());
}

TEST_CASE("expansion trace preconditions") {
  const auto path = oracles::path_kernel(4, 0.5, 0.5);
  const auto g = sample_graph(path, {2000, 0.02, 9, std::nullopt, 1});
  const auto cells = Partition::blocks_of(path);
  // Walk must follow lower-graph edges.
  CHECK_THROWS(expansion_trace(g, path, cells, {0, 2}, 0, 3, 3.0, 1));
  // Walk length is capped by omega.
  CHECK_THROWS(expansion_trace(g, path, cells, {0, 1, 2, 3, 2}, 0, 3, 2.0, 1));
  // u must belong to the first walk cell.
  std::uint32_t wrong_u = 0;
  const auto& types = std::get<std::vector<std::uint32_t>>(g.types);
  while (cells.cell_of(types[wrong_u]) == 0) ++wrong_u;
  CHECK_THROWS(expansion_trace(g, path, cells, {0, 1}, wrong_u, 3, 3.0, 1));
}

TEST_CASE("expansion trace: t caps at phi - 2 and thresholds follow S") {
  const auto path = oracles::path_kernel(4, 0.5, 0.5);
  const std::uint64_t n = 20000;
  const double p = 0.01;
  const auto g = sample_graph(path, {n, p, 13, std::nullopt, 1});
  const auto cells = Partition::blocks_of(path);
  const auto& tv = std::get<std::vector<std::uint32_t>>(g.types);
  std::uint32_t u = 0;
  while (tv[u] != 0) ++u;
  const std::uint64_t phi = 4;
  const auto tr = expansion_trace(g, path, cells, {0, 1, 2, 3}, u, phi, 4.0, 123);
  CHECK(tr.S == doctest::Approx(n * 0.25 * 0.5 * p / 4.0));
  CHECK(tr.t == std::vector<std::uint32_t>{0, 1, 2, 2});
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(tr.thresholds[k] ==
          doctest::Approx(std::pow(tr.S, static_cast<double>(tr.t[k]))));
    CHECK(tr.gamma_prime_sizes[k] <= std::max<std::uint64_t>(tr.gamma_sizes[k], 1));
  }
}

TEST_CASE("expansion trace monotone under coupled densities") {
  // Shared uniforms at two densities: the sparser graph's layers embed in
  // the denser graph's, so sizes are pointwise dominated (distinct walk
  // cells, no truncation).
  const auto path = oracles::path_kernel(3, 0.5, 0.5);
  const std::uint32_t n = 3000;
  const double p1 = 0.004, p2 = 0.012;
  auto eng = rng::make_engine(55);
  auto types_eng = rng::make_engine(rng::derive(1234, rng::kPhaseTypes));
  TypeAssignment types = sample_types(path.space(), n, types_eng);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e1, e2;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double kv = path.eval(type_value(types, i), type_value(types, j));
      const double u = rng::uniform01(eng);
      if (u < kv * p1) e1.emplace_back(i, j);
      if (u < kv * p2) e2.emplace_back(i, j);
    }
  }
  auto g1 = SampledGraph::from_edges(n, std::move(e1), types, Provenance{"", n, p1, 0});
  auto g2 = SampledGraph::from_edges(n, std::move(e2), types, Provenance{"", n, p2, 0});
  const auto cells = Partition::blocks_of(path);
  std::uint32_t u = 0;
  const auto& tv = std::get<std::vector<std::uint32_t>>(types);
  while (tv[u] != 0) ++u;
  const auto t1 = expansion_trace(g1, path, cells, {0, 1, 2}, u, 3, 2.0, 9);
  const auto t2 = expansion_trace(g2, path, cells, {0, 1, 2}, u, 3, 2.0, 9);
  REQUIRE(t1.gamma_sizes.size() == t2.gamma_sizes.size());
  for (std::size_t k = 0; k < t1.gamma_sizes.size(); ++k) {
    CHECK(t1.gamma_sizes[k] <= t2.gamma_sizes[k]);
  }
}

TEST_CASE("neighbor hit count and its expectation") {
  CHECK(s_ij(1000, 0.5, 0.2, 0.01, 10) == doctest::Approx(9.910508).epsilon(1e-4));
  CHECK(s_ij(1000, 0.5, 0.2, 0.0, 10) == 0.0);

  const auto k = Kernel::step(TypeSpace::finite({0.5, 0.5}), {{0.2, 0.2}, {0.2, 0.2}});
  const auto cells = Partition::blocks_of(k);

  // p = 0: nothing is hit.
  const auto g0 = sample_graph(k, {400, 0.0, 3, std::nullopt, 1});
  std::vector<std::uint32_t> u0;
  const auto& t0 = std::get<std::vector<std::uint32_t>>(g0.types);
  for (std::uint32_t v = 0; v < g0.n && u0.size() < 10; ++v) {
    if (t0[v] == 0) u0.push_back(v);
  }
  CHECK(neighbor_hit_count(g0, u0, 1, cells) == 0);

  // Dense limit: every vertex of the target cell outside U is hit.
  const auto c1 = Kernel::constant(TypeSpace::finite({1.0}), 1.0);
  const auto gf = sample_graph(c1, {100, 1.0, 3, std::nullopt, 1});
  const auto cf = Partition::blocks_of(c1);
  std::vector<std::uint32_t> uf{0, 1, 2, 3, 4};
  CHECK(neighbor_hit_count(gf, uf, 0, cf) == 95);

  // Preconditions: U must fit in half its cell and be cell-uniform.
  std::vector<std::uint32_t> too_big(51);
  std::iota(too_big.begin(), too_big.end(), 0);
  CHECK_THROWS(neighbor_hit_count(gf, too_big, 0, cf));

  // Monte Carlo mean against the closed form: E >= s_ij / 2 comfortably.
  const std::uint64_t n = 1000;
  const double p = 0.01;
  const std::uint64_t usz = 10;
  const double s = s_ij(static_cast<double>(n), 0.5, 0.2, p, usz);
  const int trials = 1000;
  double mean = 0;
  int done = 0;
  for (int t = 0; t < trials; ++t) {
    const auto g =
        sample_graph(k, {n, p, 9000 + static_cast<std::uint64_t>(t), std::nullopt, 1});
    const auto& tv = std::get<std::vector<std::uint32_t>>(g.types);
    std::vector<std::uint32_t> u;
    for (std::uint32_t v = 0; v < g.n && u.size() < usz; ++v) {
      if (tv[v] == 0) u.push_back(v);
    }
    if (u.size() < usz) continue;
    mean += static_cast<double>(neighbor_hit_count(g, u, 1, cells));
    ++done;
  }
  mean /= done;
  // Variance of a single count is
  // about its mean (thin binomial); 3 sigma on the Monte Carlo mean.
  const double sigma_mean = std::sqrt(s / done);
  CHECK(mean >= s / 2.0 - 3.0 * sigma_mean);
  CHECK(mean >= s - 4.0 * sigma_mean);  // the mean actually sits near s itself
}
