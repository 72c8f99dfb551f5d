#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "irg/experiments.hpp"
#include "oracles.hpp"

using namespace irg;

namespace {

ExperimentConfig base_config(Kernel kernel, ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.kernel = std::move(kernel);
  c.kernel_path = "(test)";
  c.n = 300;
  c.ps = {0.05};
  c.trials = 5;
  c.seed = 42;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const std::string text = R"({
    "kind": "diameter",
    "kernel_inline": {
      "schema": "irg-kernel/1",
      "space": {"kind": "finite", "weights": [0.5, 0.5]},
      "kernel": {"kind": "step", "matrix": [[0.5, 0.5], [0.5, 0.5]]}
    },
    "n": 500, "p": 0.05, "trials": 3, "seed": 7, "parallel": 2
  })";
  const auto c = experiment_config_from_json_text(text);
  CHECK(c.kind == ExperimentKind::kDiameter);
  CHECK(c.n == 500);
  CHECK(c.trials == 3);
  CHECK(c.kernel->block_count() == 2);

  CHECK_THROWS(experiment_config_from_json_text("{\"n\": 10}"));  // no kernel
  // Invalid densities and counts are rejected.
  ExperimentConfig bad = base_config(Kernel::constant(TypeSpace::finite({1.0}), 1.0),
                                     ExperimentKind::kDiameter);
  bad.trials = 0;
  CHECK_THROWS(bad.validate());
  bad = base_config(Kernel::constant(TypeSpace::finite({1.0}), 1.0),
                    ExperimentKind::kDiameter);
  bad.ps = {};
  CHECK_THROWS(bad.validate());
  bad.ps = {1.5};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("diameter experiment: reproducible across worker widths") {
  auto c = base_config(oracles::path_kernel(3, 0.5, 0.5), ExperimentKind::kDiameter);
  c.n = 400;
  c.ps = {0.04};
  c.trials = 8;
  c.parallel = 1;
  const auto r1 = run_diameter_experiment(c, c.ps[0]);
  c.parallel = 3;
  const auto r3 = run_diameter_experiment(c, c.ps[0]);
  REQUIRE(r1.records.size() == r3.records.size());
  for (std::size_t t = 0; t < r1.records.size(); ++t) {
    CHECK(r1.records[t].seed == r3.records[t].seed);
    CHECK(r1.records[t].diameter == r3.records[t].diameter);
    CHECK(r1.records[t].edges == r3.records[t].edges);
    CHECK(r1.records[t].connected == r3.records[t].connected);
  }
  CHECK(r1.prediction.has_value());
  CHECK(r1.aggregate.trials == 8);
}

TEST_CASE("diameter experiment: p = 0 degenerates to disconnected trials") {
  auto c = base_config(Kernel::constant(TypeSpace::finite({1.0}), 1.0),
                       ExperimentKind::kDiameter);
  c.n = 50;
  c.ps = {0.0};
  c.trials = 1;
  const auto r = run_diameter_experiment(c, 0.0);
  CHECK_FALSE(r.prediction.has_value());  // np <= 1: no regime check
  CHECK(r.records[0].diameter.is_infinite());
  CHECK(r.aggregate.connected_fraction == 0.0);
}

TEST_CASE("tail experiment") {
  auto c = base_config(
      Kernel::step(TypeSpace::finite({0.5, 0.5}), {{0.2, 0.2}, {0.2, 0.2}}),
      ExperimentKind::kTail);
  c.n = 1000;
  c.tail_cell_i = 0;
  c.tail_cell_j = 1;
  c.tail_u_size = 10;
  c.trials = 200;

  // Healthy run: S sits near its closed form and violations are rare.
  const auto r = run_tail_experiment(c, 0.02);
  CHECK(r.aggregate.s_value ==
        doctest::Approx(s_ij(1000, 0.5, 0.2, 0.02, 10)));
  CHECK_FALSE(r.aggregate.degenerate);
  CHECK(r.aggregate.violation_fraction <=
        r.aggregate.analytic_bound + 3 * r.aggregate.binomial_sigma);

  // p = 0: S = 0, every trial violates, flagged as degenerate.
  c.trials = 10;
  const auto r0 = run_tail_experiment(c, 0.0);
  CHECK(r0.aggregate.degenerate);
  CHECK(r0.aggregate.violation_fraction == 1.0);

  // u_size beyond the expected half-cell is refused.
  c.tail_u_size = 300;
  CHECK_THROWS_AS(run_tail_experiment(c, 0.02), hypothesis_error);
}

TEST_CASE("tail experiment: dense limit has no violations") {
  auto c = base_config(Kernel::constant(TypeSpace::finite({1.0}), 1.0),
                       ExperimentKind::kTail);
  c.n = 200;
  c.tail_cell_i = 0;
  c.tail_cell_j = 0;
  c.tail_u_size = 20;
  c.trials = 20;
  const auto r = run_tail_experiment(c, 1.0);
  CHECK(r.aggregate.violation_fraction == 0.0);
}

TEST_CASE("expansion experiment") {
  auto c = base_config(oracles::path_kernel(3, 0.5, 0.5), ExperimentKind::kExpansion);
  c.n = 5000;
  c.walk = {0, 1, 2};
  c.trials = 10;
  c.omega = 2.5;

  // Below the density floor the run refuses with the failed inequality.
  CHECK_THROWS_AS(run_expansion_experiment(c, 1e-5), hypothesis_error);

  const double p = 3.0 * 2.5 * std::log(5000.0) / 5000.0;
  const auto r = run_expansion_experiment(c, p);
  CHECK(r.aggregate.success_fraction > 0.5);
  for (const auto& rec : r.records) CHECK(rec.gamma_sizes.size() == 3);

  // Walk of length zero always succeeds.
  c.walk = {0};
  const auto r0 = run_expansion_experiment(c, p);
  CHECK(r0.aggregate.success_fraction == 1.0);
}

TEST_CASE("coupling experiment") {
  auto c = base_config(
      Kernel::step(TypeSpace::finite({0.5, 0.5}), {{1.0, 0.3}, {0.3, 1.0}}),
      ExperimentKind::kCoupling);
  c.n = 400;
  c.trials = 10;
  const auto r = run_coupling_experiment(c, 0.03);
  CHECK(r.aggregate.subgraph_fraction == 1.0);
  for (const auto& rec : r.records) {
    if (rec.connected && rec.er_connected) CHECK(rec.diam_ge);
  }

  // Identical kernel: the two diameters agree in every trial.
  auto ci = base_config(Kernel::constant(TypeSpace::finite({1.0}), 1.0),
                        ExperimentKind::kCoupling);
  ci.n = 300;
  ci.trials = 5;
  const auto ri = run_coupling_experiment(ci, 0.05);
  for (const auto& rec : ri.records) {
    CHECK(rec.diameter == rec.er_diameter);
  }
  CHECK(ri.aggregate.diam_ge_fraction == 1.0);
}

TEST_CASE("result files: round trip and aggregate cross-check") {
  auto c = base_config(oracles::path_kernel(3, 0.5, 0.5), ExperimentKind::kDiameter);
  c.n = 300;
  c.ps = {0.05};
  c.trials = 6;
  const auto r = run_diameter_experiment(c, 0.05);
  const std::string path = "test_result.tmp";
  write_result(r, path);

  const auto loaded = load_result(path);
  CHECK(loaded.records.size() == r.records.size());
  CHECK(loaded.kind == r.kind);
  CHECK(loaded.aggregate.connected_fraction == r.aggregate.connected_fraction);
  CHECK(loaded.aggregate.diameter_histogram == r.aggregate.diameter_histogram);
  CHECK(loaded.prediction.has_value());
  CHECK(loaded.prediction->phi == r.prediction->phi);

  // Tampering with a trial line breaks the cross-check on load.
  std::string text = slurp(path);
  const auto pos = text.find("\"connected\":true");
  if (pos != std::string::npos) {
    text.replace(pos, 16, "\"connected\":false");
    std::ofstream out(path);
    out << text;
    CHECK_THROWS_AS(load_result(path), invariant_error);
  }
  std::remove(path.c_str());
}

TEST_CASE("experiment driver sweeps densities and writes files") {
  auto c = base_config(oracles::path_kernel(3, 0.5, 0.5), ExperimentKind::kDiameter);
  c.n = 200;
  c.ps = {0.05, 0.08};
  c.trials = 3;
  c.out = "test_sweep.tmp";
  const auto results = run_experiment(c);
  REQUIRE(results.size() == 2);
  CHECK(results[0].p == 0.05);
  CHECK(results[1].p == 0.08);
  const auto l0 = load_result("test_sweep.tmp.p0");
  const auto l1 = load_result("test_sweep.tmp.p1");
  CHECK(l0.records.size() == 3);
  CHECK(l1.records.size() == 3);
  write_plot_data(results[0], "test_sweep.tmp.p0");
  CHECK(!slurp("test_sweep.tmp.p0.hist.dat").empty());
  std::remove("test_sweep.tmp.p0");
  std::remove("test_sweep.tmp.p1");
  std::remove("test_sweep.tmp.p0.hist.dat");
}

TEST_CASE("interval-hit accounting matches the prediction") {
  // Dense two-block kernel in regime iii. The density is chosen so the
  // finite-size concentration margin is comfortably positive ((np)^2/n well
  // above omega log n); only then is the predicted interval expected to
  // capture the observed diameters.
  auto c = base_config(
      Kernel::step(TypeSpace::finite({0.5, 0.5}), {{1.0, 0.8}, {0.8, 1.0}}),
      ExperimentKind::kDiameter);
  c.n = 2000;
  const double p = 0.15;
  c.ps = {p};
  c.trials = 20;
  const auto r = run_diameter_experiment(c, p);
  REQUIRE(r.prediction.has_value());
  CHECK(r.prediction->phi == 2);
  CHECK(r.prediction->diam_margin_upper > 10);
  CHECK(r.aggregate.connected_fraction == 1.0);
  CHECK(r.aggregate.interval_hit_fraction >= 0.9);
}
