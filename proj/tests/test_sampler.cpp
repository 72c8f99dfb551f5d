#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "irg/sampler.hpp"
#include "oracles.hpp"

using namespace irg;

namespace {

std::uint64_t graph_hash(const SampledGraph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  };
  mix(g.n);
  for (auto o : g.offsets) mix(o);
  for (auto v : g.neighbors) mix(v);
  mix(type_digest(g.types));
  return h;
}

Kernel two_block(std::vector<std::vector<double>> w) {
  return Kernel::step(TypeSpace::finite({0.5, 0.5}), std::move(w));
}

/// Independent reference sampler: plain double loop over pairs.
SampledGraph naive_sample(const Kernel& kernel, std::uint64_t n, double p,
                          rng::Engine& eng) {
  TypeAssignment types = sample_types(kernel.space(), n, eng);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double q = kernel.eval(type_value(types, i), type_value(types, j)) * p;
      if (rng::uniform01(eng) < q) edges.emplace_back(i, j);
    }
  }
  return SampledGraph::from_edges(static_cast<std::uint32_t>(n), std::move(edges),
                                  std::move(types), Provenance{});
}

}  // namespace

TEST_CASE("sample_types basics and concentration") {
  auto eng = rng::make_engine(1);
  const auto one = sample_types(TypeSpace::finite({1.0}), 1000, eng);
  for (auto t : std::get<std::vector<std::uint32_t>>(one)) CHECK(t == 0);

  // Binomial concentration at half/half weights.
  const std::uint64_t n = 1000000;
  auto eng2 = rng::make_engine(2);
  const auto half = sample_types(TypeSpace::finite({0.5, 0.5}), n, eng2);
  std::uint64_t zeros = 0;
  for (auto t : std::get<std::vector<std::uint32_t>>(half)) zeros += t == 0;
  const double dev = std::fabs(static_cast<double>(zeros) - 500000.0);
  CHECK(dev <= 3.0 * std::sqrt(n * 0.25));

  // Empirical CDF of uniform draws stays within 0.01 of the identity.
  auto eng3 = rng::make_engine(3);
  auto uni = sample_types(TypeSpace::interval_uniform(1.0), n, eng3);
  auto& xs = std::get<std::vector<double>>(uni);
  std::sort(xs.begin(), xs.end());
  double sup = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    sup = std::max({sup, std::fabs(xs[i] - lo), std::fabs(hi - xs[i])});
  }
  CHECK(sup < 0.01);

  // Piecewise density lands in each piece with its mass.
  auto eng4 = rng::make_engine(4);
  const auto sp = TypeSpace::interval(2.0, PiecewiseDensity{{0.0, 1.0, 2.0}, {0.8, 0.2}});
  auto pieces = sample_types(sp, 100000, eng4);
  std::uint64_t low = 0;
  for (double x : std::get<std::vector<double>>(pieces)) low += x < 1.0;
  CHECK(std::fabs(static_cast<double>(low) / 100000.0 - 0.8) < 0.01);
}

TEST_CASE("sample_graph edge cases") {
  const auto k = two_block({{0.2, 0.4}, {0.4, 0.6}});
  const auto empty = sample_graph(k, {1000, 0.0, 7, std::nullopt, 1});
  CHECK(empty.edge_count == 0);

  const auto c1 = Kernel::constant(TypeSpace::finite({1.0}), 1.0);
  const auto full = sample_graph(c1, {200, 1.0, 7, std::nullopt, 1});
  CHECK(full.edge_count == 200ull * 199 / 2);
  CHECK_FALSE(full.has_edge(5, 5));
  CHECK(full.has_edge(0, 199));
}

TEST_CASE("sample_graph mean edge count matches the mixed expectation") {
  const auto k = two_block({{0.2, 0.4}, {0.4, 0.6}});
  const std::uint64_t n = 10000;
  const double p = 0.01;
  const double expected = p * (static_cast<double>(n) * (n - 1) / 2.0) * 0.4;
  const int trials = 50;
  std::vector<double> counts;
  for (int t = 0; t < trials; ++t) {
    const auto g =
        sample_graph(k, {n, p, 1000 + static_cast<std::uint64_t>(t), std::nullopt, 1});
    counts.push_back(static_cast<double>(g.edge_count));
  }
  double mean = 0;
  for (double c : counts) mean += c;
  mean /= trials;
  double var = 0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= trials - 1;
  const double sigma_mean = std::sqrt(var / trials);
  CHECK(std::fabs(mean - expected) <= 4.0 * sigma_mean);
}

TEST_CASE("determinism across thread widths") {
  const auto k = oracles::path_kernel(4, 0.5, 0.5);
  const std::uint64_t n = 30000;
  const double p = 10.0 / static_cast<double>(n);
  const auto g1 = sample_graph(k, {n, p, 99, std::nullopt, 1});
  const auto g2 = sample_graph(k, {n, p, 99, std::nullopt, 2});
  const auto g4 = sample_graph(k, {n, p, 99, std::nullopt, 4});
  CHECK(graph_hash(g1) == graph_hash(g2));
  CHECK(graph_hash(g1) == graph_hash(g4));
  CHECK(g1.edge_count > 0);

  // And across runs with the same seed.
  const auto g1b = sample_graph(k, {n, p, 99, std::nullopt, 1});
  CHECK(graph_hash(g1) == graph_hash(g1b));
  // Different seed, different graph.
  const auto g_other = sample_graph(k, {n, p, 100, std::nullopt, 1});
  CHECK(graph_hash(g1) != graph_hash(g_other));

  // Bucket-grid path for interval kernels is deterministic too.
  const auto ov = Kernel::overlap(2, 0.01);
  const auto o1 = sample_graph(ov, {20000, 0.002, 5, std::nullopt, 1});
  const auto o3 = sample_graph(ov, {20000, 0.002, 5, std::nullopt, 3});
  CHECK(graph_hash(o1) == graph_hash(o3));
  CHECK(o1.edge_count > 0);
}

TEST_CASE("per-pair edge frequencies match the kernel probabilities") {
  // Pairs are bucketed by their probability value; each bucket's empirical
  // frequency must sit within 4 binomial sigmas.
  const auto k = two_block({{0.1, 0.3}, {0.3, 0.5}});
  const double p = 0.8;
  const std::uint64_t n = 30;
  const int trials = 10000;
  std::map<double, std::pair<std::uint64_t, std::uint64_t>> buckets;  // q -> (pairs, edges)
  for (int t = 0; t < trials; ++t) {
    const auto g =
        sample_graph(k, {n, p, 500 + static_cast<std::uint64_t>(t), std::nullopt, 1});
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) {
        const double q = k.eval(type_value(g.types, i), type_value(g.types, j)) * p;
        auto& b = buckets[q];
        b.first += 1;
        b.second += g.has_edge(i, j) ? 1 : 0;
      }
    }
  }
  CHECK(buckets.size() == 3);
  for (const auto& [q, stat] : buckets) {
    const double freq = static_cast<double>(stat.second) / static_cast<double>(stat.first);
    const double sigma = std::sqrt(q * (1 - q) / static_cast<double>(stat.first));
    CHECK(std::fabs(freq - q) <= 4.0 * sigma);
  }
}

TEST_CASE("skip sampling matches the naive sampler distribution") {
  // Two-sample chi-square on edge counts, 200 trials each at n = 500.
  const auto k = two_block({{0.3, 0.6}, {0.6, 0.2}});
  const std::uint64_t n = 500;
  const double p = 0.05;
  const int trials = 200;
  std::vector<double> skip_counts, naive_counts;
  auto naive_eng = rng::make_engine(4242);
  for (int t = 0; t < trials; ++t) {
    const auto g =
        sample_graph(k, {n, p, 7000 + static_cast<std::uint64_t>(t), std::nullopt, 1});
    skip_counts.push_back(static_cast<double>(g.edge_count));
    naive_counts.push_back(
        static_cast<double>(naive_sample(k, n, p, naive_eng).edge_count));
  }
  // Pooled sextile bins.
  std::vector<double> pooled = skip_counts;
  pooled.insert(pooled.end(), naive_counts.begin(), naive_counts.end());
  std::sort(pooled.begin(), pooled.end());
  const int bins = 6;
  std::vector<double> cuts;
  for (int b = 1; b < bins; ++b) cuts.push_back(pooled[pooled.size() * b / bins]);
  const auto bin_of = [&cuts](double v) {
    return std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin();
  };
  std::vector<double> o1(bins, 0), o2(bins, 0);
  for (double v : skip_counts) o1[bin_of(v)] += 1;
  for (double v : naive_counts) o2[bin_of(v)] += 1;
  double chi2 = 0;
  for (int b = 0; b < bins; ++b) {
    const double e = (o1[b] + o2[b]) / 2.0;  // equal sample sizes
    if (e > 0) chi2 += (o1[b] - e) * (o1[b] - e) / e + (o2[b] - e) * (o2[b] - e) / e;
  }
  // chi-square critical value at alpha = 0.001, df = 5.
  CHECK(chi2 < 20.515);
}

TEST_CASE("coupled pair") {
  const auto c1 = Kernel::constant(TypeSpace::interval_uniform(1.0), 1.0);
  const auto [k1, e1] = coupled_pair(c1, {300, 0.05, 11, std::nullopt, 1});
  CHECK(k1.edge_count == e1.edge_count);
  CHECK(k1.neighbors == e1.neighbors);

  const auto c0 = Kernel::constant(TypeSpace::interval_uniform(1.0), 0.0);
  const auto [k0, e0] = coupled_pair(c0, {300, 0.05, 11, std::nullopt, 1});
  CHECK(k0.edge_count == 0);
  CHECK(e0.edge_count > 0);

  // Subgraph containment holds pair by pair.
  const auto mixed = two_block({{1.0, 0.3}, {0.3, 1.0}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [gk, ge] = coupled_pair(mixed, {300, 0.05, seed, std::nullopt, 1});
    for (std::uint32_t v = 0; v < gk.n; ++v) {
      const auto kr = gk.row(v);
      CHECK(std::includes(ge.row(v).begin(), ge.row(v).end(), kr.begin(), kr.end()));
    }
  }
}

TEST_CASE("edge list round trip") {
  const auto k = two_block({{0.2, 0.4}, {0.4, 0.6}});
  const auto g = sample_graph(k, {500, 0.02, 21, std::nullopt, 1});
  const std::string path = "test_edges.tmp";
  write_edge_list(g, path);
  const auto loaded = read_edge_list(path);
  CHECK(loaded.n == g.n);
  CHECK(loaded.edge_count == g.edge_count);
  CHECK(loaded.offsets == g.offsets);
  CHECK(loaded.neighbors == g.neighbors);
  std::remove(path.c_str());
  std::remove((path + ".meta.json").c_str());
}
