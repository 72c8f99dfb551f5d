// Command-line front end: sample graphs, measure exact diameters, compute
// partition-diameter bounds, classify density regimes, and drive seeded
// experiment batches.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "irg/experiments.hpp"
#include "irg/graphalg.hpp"
#include "irg/kernel.hpp"
#include "irg/regimes.hpp"
#include "irg/sampler.hpp"

namespace {

int run_sample(const std::string& kernel_path, std::uint64_t n, double p,
               std::uint64_t seed, const std::string& out, unsigned threads) {
  const irg::Kernel kernel = irg::load_kernel(kernel_path);
  irg::SampleParams params{n, p, seed, std::nullopt, threads};
  const irg::SampledGraph g = irg::sample_graph(kernel, params);
  irg::write_edge_list(g, out);
  std::cout << "{\"n\": " << g.n << ", \"edges\": " << g.edge_count << ", \"out\": \""
            << out << "\"}\n";
  return 0;
}

int run_diameter(const std::string& graph_path, std::optional<std::uint32_t> n) {
  const irg::SampledGraph g = irg::read_edge_list(graph_path, n);
  const auto conn = irg::connected(g);
  const auto diam = irg::exact_diameter(g);
  std::cout << "{\"n\": " << g.n << ", \"edges\": " << g.edge_count
            << ", \"connected\": " << (conn.connected ? "true" : "false")
            << ", \"diameter\": "
            << (diam.diameter.is_infinite() ? std::string("\"inf\"")
                                            : std::to_string(diam.diameter.value()))
            << ", \"bfs_sweeps_used\": " << diam.bfs_sweeps << "}\n";
  return 0;
}

int run_deltas(const std::string& kernel_path, std::size_t grid_start, int rounds) {
  const irg::Kernel kernel = irg::load_kernel(kernel_path);
  irg::DeltaOptions options;
  options.grid_start = grid_start;
  options.grid_rounds = rounds;
  const irg::DeltaBounds bounds = irg::delta_bounds(kernel, options);
  std::cout << irg::delta_bounds_json_text(bounds) << "\n";
  return 0;
}

int run_predict(const std::string& kernel_path, std::uint64_t n, double p,
                std::optional<double> omega) {
  const irg::Kernel kernel = irg::load_kernel(kernel_path);
  irg::PredictOptions options;
  options.omega = omega;
  const irg::RegimeReport report = irg::predict(kernel, n, p, options);
  std::cout << irg::regime_report_json_text(report) << "\n";
  return report.diagnostics.empty() ? 0 : 1;
}

int run_experiment_cmd(const std::string& config_path, const std::string& kind_override,
                       std::optional<std::uint64_t> seed,
                       std::optional<std::uint64_t> trials,
                       std::optional<unsigned> parallel, const std::string& out_override,
                       bool plot_data) {
  irg::ExperimentConfig config = irg::load_experiment_config(config_path);
  if (!kind_override.empty())
    config.kind = irg::experiment_kind_from_name(kind_override);
  if (seed) config.seed = *seed;
  if (trials) config.trials = *trials;
  if (parallel) config.parallel = *parallel;
  if (!out_override.empty()) config.out = out_override;
  const auto results = irg::run_experiment(config);
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::cout << irg::aggregate_json_text(results[i]) << "\n";
    if (plot_data) {
      const std::string base = config.out.empty()
                                   ? "experiment"
                                   : (results.size() == 1
                                          ? config.out
                                          : config.out + ".p" + std::to_string(i));
      irg::write_plot_data(results[i], base);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inhomogeneous random graph simulator"};
  app.require_subcommand(1);

  std::string kernel_path, graph_path, config_path, out, kind;
  std::uint64_t n = 0, seed = 0, trials_v = 0;
  double p = 0;
  double omega_v = 0;
  unsigned threads = 1, parallel_v = 0;
  std::uint32_t n_override = 0;
  std::size_t grid_start = 8;
  int rounds = 5;
  bool plot_data = false;

  auto* sample = app.add_subcommand("sample", "sample a graph and write an edge list");
  sample->add_option("--kernel", kernel_path, "kernel definition file")->required();
  sample->add_option("-n,--n", n, "vertex count")->required();
  sample->add_option("-p,--p", p, "density parameter")->required();
  sample->add_option("--seed", seed, "root seed");
  sample->add_option("--out", out, "edge list path")->required();
  sample->add_option("--threads", threads, "sampler threads");

  auto* diameter = app.add_subcommand("diameter", "exact diameter of an edge-list graph");
  diameter->add_option("--graph", graph_path, "edge list path")->required();
  auto* n_opt = diameter->add_option("--n", n_override, "vertex count override");

  auto* deltas = app.add_subcommand("deltas", "extremal partition-graph diameters");
  deltas->add_option("--kernel", kernel_path, "kernel definition file")->required();
  deltas->add_option("--grid-start", grid_start, "first grid resolution");
  deltas->add_option("--rounds", rounds, "doubling rounds");

  auto* predict = app.add_subcommand("predict", "diameter regime classification");
  predict->add_option("--kernel", kernel_path, "kernel definition file")->required();
  predict->add_option("-n,--n", n, "vertex count")->required();
  predict->add_option("-p,--p", p, "density parameter")->required();
  auto* omega_opt = predict->add_option("--omega", omega_v, "slack function value");

  auto* experiment = app.add_subcommand("experiment", "seeded trial batches");
  experiment->add_option("--config", config_path, "experiment config file")->required();
  experiment->add_option("--kind", kind, "diameter|tail|expansion|coupling");
  auto* seed_opt = experiment->add_option("--seed", seed, "root seed override");
  auto* trials_opt = experiment->add_option("--trials", trials_v, "trial count override");
  auto* parallel_opt =
      experiment->add_option("--parallel", parallel_v, "worker width override");
  experiment->add_option("--out", out, "result path override");
  experiment->add_flag("--plot-data", plot_data, "emit (x,y) series files");

  auto* expansion = app.add_subcommand("expansion", "layer-growth experiment");
  expansion->add_option("--config", config_path, "experiment config file")->required();
  auto* seed_opt2 = expansion->add_option("--seed", seed, "root seed override");
  auto* trials_opt2 = expansion->add_option("--trials", trials_v, "trial count override");
  auto* parallel_opt2 =
      expansion->add_option("--parallel", parallel_v, "worker width override");
  expansion->add_option("--out", out, "result path override");
  expansion->add_flag("--plot-data", plot_data, "emit (x,y) series files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) return run_sample(kernel_path, n, p, seed, out, threads);
    if (diameter->parsed()) {
      std::optional<std::uint32_t> n_opt_v;
      if (n_opt->count() > 0) n_opt_v = n_override;
      return run_diameter(graph_path, n_opt_v);
    }
    if (deltas->parsed()) return run_deltas(kernel_path, grid_start, rounds);
    if (predict->parsed()) {
      std::optional<double> omega;
      if (omega_opt->count() > 0) omega = omega_v;
      return run_predict(kernel_path, n, p, omega);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(
          config_path, kind, seed_opt->count() ? std::optional(seed) : std::nullopt,
          trials_opt->count() ? std::optional(trials_v) : std::nullopt,
          parallel_opt->count() ? std::optional(parallel_v) : std::nullopt, out,
          plot_data);
    }
    if (expansion->parsed()) {
      return run_experiment_cmd(
          config_path, "expansion", seed_opt2->count() ? std::optional(seed) : std::nullopt,
          trials_opt2->count() ? std::optional(trials_v) : std::nullopt,
          parallel_opt2->count() ? std::optional(parallel_v) : std::nullopt, out,
          plot_data);
    }
  } catch (const irg::hypothesis_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const irg::invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
