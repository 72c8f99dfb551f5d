#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irg/graphalg.hpp"
#include "irg/regimes.hpp"
#include "irg/sampler.hpp"

namespace irg {

/// A run refused because the lemma/theorem hypotheses fail on the inputs.
struct hypothesis_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal invariant broke (sampler bug, corrupt result file, ...).
struct invariant_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kDiameter, kTail, kExpansion, kCoupling };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kDiameter;
  std::optional<Kernel> kernel;
  std::string kernel_path;  // echo for provenance
  std::uint64_t n = 1;
  std::vector<double> ps;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  unsigned parallel = 1;
  std::optional<double> omega;
  double accept_fraction = 0.9;
  // Tail runs.
  std::size_t tail_cell_i = 0;
  std::size_t tail_cell_j = 0;
  std::uint64_t tail_u_size = 0;
  // Expansion runs.
  std::vector<std::uint32_t> walk;
  // Cell structure for tail/expansion; defaults to the kernel's blocks.
  std::optional<Partition> partition;

  void validate() const;
  const Partition& cells() const;

 private:
  mutable std::optional<Partition> default_partition_;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_json_text(const std::string& text);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  // diameter / coupling
  bool connected = false;
  HopCount diameter = HopCount(0);
  std::uint64_t edges = 0;
  // tail
  std::uint64_t count = 0;
  bool violated = false;
  // expansion
  std::vector<std::uint64_t> gamma_sizes;
  bool all_bounds = false;
  // coupling
  bool subgraph_ok = false;
  bool er_connected = false;
  HopCount er_diameter = HopCount(0);
  bool diam_ge = false;
};

struct Aggregate {
  std::uint64_t trials = 0;
  std::map<std::string, std::uint64_t> diameter_histogram;
  double connected_fraction = 0;
  double interval_hit_fraction = 0;  // among connected trials
  double violation_fraction = 0;
  double analytic_bound = 0;  // exp(-S/16)
  double binomial_sigma = 0;
  double s_value = 0;
  bool degenerate = false;  // S == 0, bound vacuous
  double success_fraction = 0;
  double subgraph_fraction = 0;
  double diam_ge_fraction = 0;  // among trials with both graphs connected
  std::uint64_t both_connected = 0;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::kDiameter;
  std::uint64_t n = 0;
  double p = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string kernel_id;
  std::optional<RegimeReport> prediction;  // diameter runs
  std::vector<TrialRecord> records;
  Aggregate aggregate;
  double wall_seconds = 0;
};

ExperimentResult run_diameter_experiment(const ExperimentConfig& config, double p);
ExperimentResult run_tail_experiment(const ExperimentConfig& config, double p);
ExperimentResult run_expansion_experiment(const ExperimentConfig& config, double p);
ExperimentResult run_coupling_experiment(const ExperimentConfig& config, double p);

/// Runs the configured kind over the density sweep; when an output path is
/// set, each density writes <out> (single) or <out>.p<i> (sweep).
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config);

/// Line-delimited records plus a trailing summary record (schema
/// irg-experiment/1). Loading recomputes the aggregate from the trial lines
/// and fails on any mismatch with the stored summary.
void write_result(const ExperimentResult& result, const std::string& path);
ExperimentResult load_result(const std::string& path);

/// (x, y) series for external plotting: the diameter histogram, or the
/// expansion step profile against its thresholds.
void write_plot_data(const ExperimentResult& result, const std::string& base_path);

Aggregate recompute_aggregate(const ExperimentResult& result);

const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);

// JSON renderings for the CLI.
std::string regime_report_json_text(const RegimeReport& report);
std::string delta_bounds_json_text(const DeltaBounds& bounds);
std::string aggregate_json_text(const ExperimentResult& result);

}  // namespace irg
