#include "irg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace irg {

using nlohmann::json;

namespace {

json hop_to_json(HopCount h) {
  if (h.is_infinite()) return json("inf");
  return json(h.value());
}

HopCount hop_from_json(const json& j) {
  if (j.is_string()) return HopCount::infinity();
  return HopCount(j.get<std::uint64_t>());
}

json report_to_json(const RegimeReport& r) {
  json j;
  j["phi"] = r.phi;
  j["ratio"] = r.ratio;
  j["phi_snapped"] = r.phi_snapped;
  j["lattice_margin"] = r.lattice_margin;
  j["margin_ok"] = r.margin_ok;
  j["diam_margin_upper"] = r.diam_margin_upper;
  j["diam_margin_lower"] = r.diam_margin_lower;
  j["omega"] = r.omega;
  j["delta_u"] = hop_to_json(r.delta.delta_u);
  j["delta_l"] = hop_to_json(r.delta.delta_l);
  j["delta_exact"] = r.delta.exact;
  j["delta_resolution"] = r.delta.resolution;
  j["regime"] = regime_name(r.regime);
  j["interval"] = {hop_to_json(r.interval_lo), hop_to_json(r.interval_hi)};
  j["walk_condition"] = walk_condition_name(r.walk_condition);
  j["theorem_applicable"] = r.theorem_applicable;
  j["diagnostics"] = r.diagnostics;
  return j;
}

RegimeReport report_from_json(const json& j) {
  RegimeReport r;
  r.phi = j.at("phi").get<std::uint64_t>();
  r.ratio = j.at("ratio").get<double>();
  r.phi_snapped = j.at("phi_snapped").get<bool>();
  r.lattice_margin = j.at("lattice_margin").get<double>();
  r.margin_ok = j.at("margin_ok").get<bool>();
  r.diam_margin_upper = j.at("diam_margin_upper").get<double>();
  r.diam_margin_lower = j.at("diam_margin_lower").get<double>();
  r.omega = j.at("omega").get<double>();
  r.delta.delta_u = hop_from_json(j.at("delta_u"));
  r.delta.delta_l = hop_from_json(j.at("delta_l"));
  r.delta.exact = j.at("delta_exact").get<bool>();
  r.delta.resolution = j.at("delta_resolution").get<std::uint64_t>();
  const std::string reg = j.at("regime").get<std::string>();
  r.regime = reg == "i" ? Regime::kI : (reg == "ii" ? Regime::kII : Regime::kIII);
  r.interval_lo = hop_from_json(j.at("interval")[0]);
  r.interval_hi = hop_from_json(j.at("interval")[1]);
  const std::string wc = j.at("walk_condition").get<std::string>();
  r.walk_condition = wc == "holds" ? WalkConditionVerdict::kHolds
                     : wc == "fails" ? WalkConditionVerdict::kFails
                                     : WalkConditionVerdict::kUnknown;
  r.theorem_applicable = j.at("theorem_applicable").get<bool>();
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return r;
}

/// Runs trial bodies over a pool; records land at their trial index, so the
/// result is independent of the pool width.
template <typename Body>
void run_trials(std::uint64_t trials, unsigned width, const Body& body) {
  if (width <= 1 || trials <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(width);
  for (unsigned w = 0; w < width; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          if (failed.load()) return;
          const std::uint64_t t = next.fetch_add(1);
          if (t >= trials) return;
          body(t);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        failed.store(true);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::uint64_t t) {
  return rng::derive(config.seed, rng::kPhaseTrial, t);
}

std::vector<std::uint32_t> members_of_cell(const SampledGraph& g, const Partition& cells,
                                           std::size_t cell) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (cells.cell_of(type_value(g.types, v)) == cell) out.push_back(v);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (!kernel) throw std::invalid_argument("experiment config: no kernel");
  if (trials < 1) throw std::invalid_argument("experiment config: trials must be >= 1");
  if (ps.empty()) throw std::invalid_argument("experiment config: empty density sweep");
  if (n < 1) throw std::invalid_argument("experiment config: n must be >= 1");
  for (double p : ps) {
    if (!(p >= 0 && p <= 1))
      throw std::invalid_argument("experiment config: density outside [0, 1]");
  }
  if (kind == ExperimentKind::kExpansion && walk.empty())
    throw std::invalid_argument("experiment config: expansion runs need a walk");
  if (kind == ExperimentKind::kTail && tail_u_size == 0)
    throw std::invalid_argument("experiment config: tail runs need u_size >= 1");
}

const Partition& ExperimentConfig::cells() const {
  if (partition) return *partition;
  if (!default_partition_) {
    if (!kernel->is_steplike())
      throw std::invalid_argument(
          "experiment config: non-step kernels need an explicit partition");
    default_partition_ = Partition::blocks_of(*kernel);
  }
  return *default_partition_;
}

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("kind")) c.kind = experiment_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("kernel")) {
    c.kernel_path = j.at("kernel").get<std::string>();
    c.kernel = load_kernel(c.kernel_path);
  } else if (j.contains("kernel_inline")) {
    c.kernel = kernel_from_json_text(j.at("kernel_inline").dump());
    c.kernel_path = "(inline)";
  } else {
    throw std::invalid_argument("experiment config: need kernel or kernel_inline");
  }
  c.n = j.at("n").get<std::uint64_t>();
  if (j.contains("p")) {
    c.ps = {j.at("p").get<double>()};
  } else if (j.contains("p_list")) {
    c.ps = j.at("p_list").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("experiment config: need p or p_list");
  }
  if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("parallel")) c.parallel = j.at("parallel").get<unsigned>();
  if (j.contains("omega")) c.omega = j.at("omega").get<double>();
  if (j.contains("accept_fraction"))
    c.accept_fraction = j.at("accept_fraction").get<double>();
  if (j.contains("tail")) {
    const auto& t = j.at("tail");
    c.tail_cell_i = t.at("cell_i").get<std::size_t>();
    c.tail_cell_j = t.at("cell_j").get<std::size_t>();
    c.tail_u_size = t.at("u_size").get<std::uint64_t>();
  }
  if (j.contains("walk")) c.walk = j.at("walk").get<std::vector<std::uint32_t>>();
  if (j.contains("partition")) {
    const auto& pj = j.at("partition");
    if (pj.contains("breakpoints")) {
      c.partition = Partition::from_breakpoints(
          c.kernel->space(), pj.at("breakpoints").get<std::vector<double>>());
    } else if (pj.contains("groups")) {
      c.partition = Partition::from_groups(
          c.kernel->space(),
          pj.at("groups").get<std::vector<std::vector<std::uint32_t>>>());
    } else {
      throw std::invalid_argument("experiment config: partition needs breakpoints or groups");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return experiment_config_from_json_text(ss.str());
}

// ---------------------------------------------------------------------------
// Aggregation

Aggregate recompute_aggregate(const ExperimentResult& result) {
  Aggregate a;
  a.trials = result.records.size();
  if (a.trials == 0) return a;
  switch (result.kind) {
    case ExperimentKind::kDiameter: {
      std::uint64_t conn = 0, hits = 0;
      for (const auto& r : result.records) {
        ++a.diameter_histogram[r.diameter.str()];
        if (r.connected) {
          ++conn;
          if (result.prediction && r.diameter >= result.prediction->interval_lo &&
              r.diameter <= result.prediction->interval_hi)
            ++hits;
        }
      }
      a.connected_fraction = static_cast<double>(conn) / static_cast<double>(a.trials);
      a.interval_hit_fraction =
          conn == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(conn);
      break;
    }
    case ExperimentKind::kTail: {
      std::uint64_t viol = 0;
      for (const auto& r : result.records) viol += r.violated ? 1 : 0;
      a.violation_fraction = static_cast<double>(viol) / static_cast<double>(a.trials);
      break;
    }
    case ExperimentKind::kExpansion: {
      std::uint64_t ok = 0;
      for (const auto& r : result.records) ok += r.all_bounds ? 1 : 0;
      a.success_fraction = static_cast<double>(ok) / static_cast<double>(a.trials);
      break;
    }
    case ExperimentKind::kCoupling: {
      std::uint64_t sub = 0, both = 0, ge = 0;
      for (const auto& r : result.records) {
        sub += r.subgraph_ok ? 1 : 0;
        if (r.connected && r.er_connected) {
          ++both;
          ge += r.diam_ge ? 1 : 0;
        }
      }
      a.subgraph_fraction = static_cast<double>(sub) / static_cast<double>(a.trials);
      a.both_connected = both;
      a.diam_ge_fraction =
          both == 0 ? 0.0 : static_cast<double>(ge) / static_cast<double>(both);
      break;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Runners

ExperimentResult run_diameter_experiment(const ExperimentConfig& config, double p) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.kind = ExperimentKind::kDiameter;
  result.n = config.n;
  result.p = p;
  result.trials = config.trials;
  result.seed = config.seed;
  result.kernel_id = config.kernel->id();
  // Regime prediction needs np > 1; runs below that line still measure.
  if (static_cast<double>(config.n) * p > 1.0)
    result.prediction = predict(*config.kernel, config.n, p, PredictOptions{config.omega, {}});
  result.records.resize(config.trials);

  run_trials(config.trials, config.parallel, [&](std::uint64_t t) {
    SampleParams params{config.n, p, trial_seed(config, t), config.omega, 1};
    const SampledGraph g = sample_graph(*config.kernel, params);
    TrialRecord rec;
    rec.trial = t;
    rec.seed = params.seed;
    rec.edges = g.edge_count;
    rec.connected = connected(g).connected;
    rec.diameter = rec.connected ? exact_diameter(g).diameter : HopCount::infinity();
    result.records[t] = std::move(rec);
  });

  result.aggregate = recompute_aggregate(result);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentResult run_tail_experiment(const ExperimentConfig& config, double p) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Partition& cells = config.cells();
  if (config.tail_cell_i >= cells.size() || config.tail_cell_j >= cells.size())
    throw std::invalid_argument("tail experiment: cell index out of range");
  const double mu_i = cells.measures()[config.tail_cell_i];
  const double mu_j = cells.measures()[config.tail_cell_j];
  const double expected_half = static_cast<double>(config.n) * mu_i / 2.0;
  if (static_cast<double>(config.tail_u_size) > expected_half)
    throw hypothesis_error("tail experiment: u_size " + std::to_string(config.tail_u_size) +
                           " exceeds expected |V(A_i)|/2 = " + std::to_string(expected_half));
  const double k_l = kernel_inf(*config.kernel, cells.cells()[config.tail_cell_i],
                                cells.cells()[config.tail_cell_j]);
  const double S =
      s_ij(static_cast<double>(config.n), mu_j, k_l, p, config.tail_u_size);

  ExperimentResult result;
  result.kind = ExperimentKind::kTail;
  result.n = config.n;
  result.p = p;
  result.trials = config.trials;
  result.seed = config.seed;
  result.kernel_id = config.kernel->id();
  result.records.resize(config.trials);

  run_trials(config.trials, config.parallel, [&](std::uint64_t t) {
    SampleParams params{config.n, p, trial_seed(config, t), config.omega, 1};
    const SampledGraph g = sample_graph(*config.kernel, params);
    const auto vi = members_of_cell(g, cells, config.tail_cell_i);
    if (vi.size() < 2 * config.tail_u_size)
      throw hypothesis_error("tail experiment: trial " + std::to_string(t) +
                             " realized |V(A_i)| = " + std::to_string(vi.size()) +
                             " < 2 * u_size");
    auto pick = rng::make_engine(rng::derive(params.seed, rng::kPhasePick));
    std::vector<std::uint32_t> u_set(vi);
    for (std::uint64_t i = 0; i < config.tail_u_size; ++i) {
      const std::uint64_t j = i + rng::uniform_below(pick, u_set.size() - i);
      std::swap(u_set[i], u_set[j]);
    }
    u_set.resize(config.tail_u_size);
    TrialRecord rec;
    rec.trial = t;
    rec.seed = params.seed;
    rec.count = neighbor_hit_count(g, u_set, config.tail_cell_j, cells);
    rec.violated = static_cast<double>(rec.count) <= S / 4.0;
    result.records[t] = std::move(rec);
  });

  result.aggregate = recompute_aggregate(result);
  result.aggregate.s_value = S;
  result.aggregate.analytic_bound = std::exp(-S / 16.0);
  result.aggregate.degenerate = !(S > 0);
  result.aggregate.binomial_sigma =
      std::sqrt(result.aggregate.analytic_bound * (1 - result.aggregate.analytic_bound) /
                static_cast<double>(config.trials));
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentResult run_expansion_experiment(const ExperimentConfig& config, double p) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const double omega = config.omega ? *config.omega : default_omega(config.n);
  const double p_floor = omega * std::log(static_cast<double>(config.n)) /
                         static_cast<double>(config.n);
  if (p < p_floor) {
    std::ostringstream msg;
    msg << "expansion experiment: hypothesis p >= omega log n / n fails: " << p << " < "
        << p_floor;
    throw hypothesis_error(msg.str());
  }
  if (static_cast<double>(config.walk.size()) - 1 > std::ceil(omega))
    throw hypothesis_error("expansion experiment: walk length exceeds omega = " +
                           std::to_string(omega));
  const Partition& cells = config.cells();
  const std::uint64_t phi = expansion_factor(config.n, p);

  ExperimentResult result;
  result.kind = ExperimentKind::kExpansion;
  result.n = config.n;
  result.p = p;
  result.trials = config.trials;
  result.seed = config.seed;
  result.kernel_id = config.kernel->id();
  result.records.resize(config.trials);

  run_trials(config.trials, config.parallel, [&](std::uint64_t t) {
    SampleParams params{config.n, p, trial_seed(config, t), config.omega, 1};
    const SampledGraph g = sample_graph(*config.kernel, params);
    const auto v0 = members_of_cell(g, cells, config.walk.front());
    if (v0.empty())
      throw hypothesis_error("expansion experiment: trial " + std::to_string(t) +
                             " has an empty start cell");
    auto pick = rng::make_engine(rng::derive(params.seed, rng::kPhasePick));
    const std::uint32_t u = v0[rng::uniform_below(pick, v0.size())];
    const ExpansionTrace tr =
        expansion_trace(g, *config.kernel, cells, config.walk, u, phi, omega,
                        rng::derive(params.seed, rng::kPhaseTruncation));
    TrialRecord rec;
    rec.trial = t;
    rec.seed = params.seed;
    rec.gamma_sizes = tr.gamma_sizes;
    rec.all_bounds = tr.all_satisfied();
    result.records[t] = std::move(rec);
  });

  result.aggregate = recompute_aggregate(result);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentResult run_coupling_experiment(const ExperimentConfig& config, double p) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.kind = ExperimentKind::kCoupling;
  result.n = config.n;
  result.p = p;
  result.trials = config.trials;
  result.seed = config.seed;
  result.kernel_id = config.kernel->id();
  result.records.resize(config.trials);

  run_trials(config.trials, config.parallel, [&](std::uint64_t t) {
    SampleParams params{config.n, p, trial_seed(config, t), config.omega, 1};
    const auto [gk, ge] = coupled_pair(*config.kernel, params);
    bool subgraph = true;
    for (std::uint32_t v = 0; v < gk.n && subgraph; ++v) {
      const auto kr = gk.row(v);
      subgraph = std::includes(ge.row(v).begin(), ge.row(v).end(), kr.begin(), kr.end());
    }
    if (!subgraph)
      throw invariant_error("coupling experiment: kernel graph not a subgraph (trial " +
                            std::to_string(t) + ")");
    TrialRecord rec;
    rec.trial = t;
    rec.seed = params.seed;
    rec.subgraph_ok = true;
    rec.edges = gk.edge_count;
    rec.connected = connected(gk).connected;
    rec.er_connected = connected(ge).connected;
    if (rec.connected) rec.diameter = exact_diameter(gk).diameter;
    if (rec.er_connected) rec.er_diameter = exact_diameter(ge).diameter;
    rec.diam_ge = rec.connected && rec.er_connected && rec.diameter >= rec.er_diameter;
    result.records[t] = std::move(rec);
  });

  result.aggregate = recompute_aggregate(result);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<ExperimentResult> out;
  for (std::size_t i = 0; i < config.ps.size(); ++i) {
    const double p = config.ps[i];
    ExperimentResult r;
    switch (config.kind) {
      case ExperimentKind::kDiameter: r = run_diameter_experiment(config, p); break;
      case ExperimentKind::kTail: r = run_tail_experiment(config, p); break;
      case ExperimentKind::kExpansion: r = run_expansion_experiment(config, p); break;
      case ExperimentKind::kCoupling: r = run_coupling_experiment(config, p); break;
    }
    if (!config.out.empty()) {
      const std::string path =
          config.ps.size() == 1 ? config.out : config.out + ".p" + std::to_string(i);
      write_result(r, path);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Result files

namespace {

json record_to_json(const ExperimentResult& res, const TrialRecord& r) {
  json j{{"type", "trial"}, {"trial", r.trial}, {"seed", r.seed}};
  switch (res.kind) {
    case ExperimentKind::kDiameter:
      j["connected"] = r.connected;
      j["diameter"] = hop_to_json(r.diameter);
      j["edges"] = r.edges;
      break;
    case ExperimentKind::kTail:
      j["count"] = r.count;
      j["violated"] = r.violated;
      break;
    case ExperimentKind::kExpansion:
      j["gamma_sizes"] = r.gamma_sizes;
      j["all_bounds"] = r.all_bounds;
      break;
    case ExperimentKind::kCoupling:
      j["subgraph_ok"] = r.subgraph_ok;
      j["connected"] = r.connected;
      j["er_connected"] = r.er_connected;
      j["diameter"] = hop_to_json(r.diameter);
      j["er_diameter"] = hop_to_json(r.er_diameter);
      j["diam_ge"] = r.diam_ge;
      break;
  }
  return j;
}

TrialRecord record_from_json(ExperimentKind kind, const json& j) {
  TrialRecord r;
  r.trial = j.at("trial").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  switch (kind) {
    case ExperimentKind::kDiameter:
      r.connected = j.at("connected").get<bool>();
      r.diameter = hop_from_json(j.at("diameter"));
      r.edges = j.at("edges").get<std::uint64_t>();
      break;
    case ExperimentKind::kTail:
      r.count = j.at("count").get<std::uint64_t>();
      r.violated = j.at("violated").get<bool>();
      break;
    case ExperimentKind::kExpansion:
      r.gamma_sizes = j.at("gamma_sizes").get<std::vector<std::uint64_t>>();
      r.all_bounds = j.at("all_bounds").get<bool>();
      break;
    case ExperimentKind::kCoupling:
      r.subgraph_ok = j.at("subgraph_ok").get<bool>();
      r.connected = j.at("connected").get<bool>();
      r.er_connected = j.at("er_connected").get<bool>();
      r.diameter = hop_from_json(j.at("diameter"));
      r.er_diameter = hop_from_json(j.at("er_diameter"));
      r.diam_ge = j.at("diam_ge").get<bool>();
      break;
  }
  return r;
}

json aggregate_to_json(const Aggregate& a) {
  json j;
  j["trials"] = a.trials;
  j["diameter_histogram"] = a.diameter_histogram;
  j["connected_fraction"] = a.connected_fraction;
  j["interval_hit_fraction"] = a.interval_hit_fraction;
  j["violation_fraction"] = a.violation_fraction;
  j["analytic_bound"] = a.analytic_bound;
  j["binomial_sigma"] = a.binomial_sigma;
  j["s_value"] = a.s_value;
  j["degenerate"] = a.degenerate;
  j["success_fraction"] = a.success_fraction;
  j["subgraph_fraction"] = a.subgraph_fraction;
  j["diam_ge_fraction"] = a.diam_ge_fraction;
  j["both_connected"] = a.both_connected;
  return j;
}

Aggregate aggregate_from_json(const json& j) {
  Aggregate a;
  a.trials = j.at("trials").get<std::uint64_t>();
  a.diameter_histogram =
      j.at("diameter_histogram").get<std::map<std::string, std::uint64_t>>();
  a.connected_fraction = j.at("connected_fraction").get<double>();
  a.interval_hit_fraction = j.at("interval_hit_fraction").get<double>();
  a.violation_fraction = j.at("violation_fraction").get<double>();
  a.analytic_bound = j.at("analytic_bound").get<double>();
  a.binomial_sigma = j.at("binomial_sigma").get<double>();
  a.s_value = j.at("s_value").get<double>();
  a.degenerate = j.at("degenerate").get<bool>();
  a.success_fraction = j.at("success_fraction").get<double>();
  a.subgraph_fraction = j.at("subgraph_fraction").get<double>();
  a.diam_ge_fraction = j.at("diam_ge_fraction").get<double>();
  a.both_connected = j.at("both_connected").get<std::uint64_t>();
  return a;
}

bool aggregates_match(const Aggregate& a, const Aggregate& b) {
  const auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-12; };
  return a.trials == b.trials && a.diameter_histogram == b.diameter_histogram &&
         close(a.connected_fraction, b.connected_fraction) &&
         close(a.interval_hit_fraction, b.interval_hit_fraction) &&
         close(a.violation_fraction, b.violation_fraction) &&
         close(a.success_fraction, b.success_fraction) &&
         close(a.subgraph_fraction, b.subgraph_fraction) &&
         close(a.diam_ge_fraction, b.diam_ge_fraction) &&
         a.both_connected == b.both_connected;
}

}  // namespace

void write_result(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write result file: " + path);
  for (const auto& r : result.records) out << record_to_json(result, r).dump() << "\n";
  json summary{{"type", "summary"},
               {"schema", "irg-experiment/1"},
               {"kind", experiment_kind_name(result.kind)},
               {"n", result.n},
               {"p", result.p},
               {"trials", result.trials},
               {"seed", result.seed},
               {"kernel", result.kernel_id},
               {"wall_seconds", result.wall_seconds},
               {"aggregate", aggregate_to_json(result.aggregate)}};
  if (result.prediction) summary["prediction"] = report_to_json(*result.prediction);
  out << summary.dump() << "\n";
}

ExperimentResult load_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open result file: " + path);
  std::string line;
  std::vector<json> lines;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(json::parse(line));
  }
  if (lines.empty() || lines.back().at("type") != "summary")
    throw invariant_error("result file has no summary record: " + path);
  const json& summary = lines.back();

  ExperimentResult result;
  result.kind = experiment_kind_from_name(summary.at("kind").get<std::string>());
  result.n = summary.at("n").get<std::uint64_t>();
  result.p = summary.at("p").get<double>();
  result.trials = summary.at("trials").get<std::uint64_t>();
  result.seed = summary.at("seed").get<std::uint64_t>();
  result.kernel_id = summary.at("kernel").get<std::string>();
  result.wall_seconds = summary.at("wall_seconds").get<double>();
  if (summary.contains("prediction"))
    result.prediction = report_from_json(summary.at("prediction"));
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    if (lines[i].at("type") != "trial")
      throw invariant_error("unexpected record type in " + path);
    result.records.push_back(record_from_json(result.kind, lines[i]));
  }
  if (result.records.size() != result.trials)
    throw invariant_error("result file trial count mismatch: " + path);

  const Aggregate stored = aggregate_from_json(summary.at("aggregate"));
  Aggregate recomputed = recompute_aggregate(result);
  // Analytic-side fields are not derivable from trial lines; carry them over.
  recomputed.s_value = stored.s_value;
  recomputed.analytic_bound = stored.analytic_bound;
  recomputed.binomial_sigma = stored.binomial_sigma;
  recomputed.degenerate = stored.degenerate;
  if (!aggregates_match(stored, recomputed))
    throw invariant_error("stored aggregate disagrees with per-trial records: " + path);
  result.aggregate = recomputed;
  return result;
}

void write_plot_data(const ExperimentResult& result, const std::string& base_path) {
  if (result.kind == ExperimentKind::kDiameter ||
      result.kind == ExperimentKind::kCoupling) {
    std::ofstream out(base_path + ".hist.dat");
    if (!out) throw std::runtime_error("cannot write plot data: " + base_path);
    out << "# diameter count\n";
    for (const auto& [d, c] : result.aggregate.diameter_histogram)
      out << d << " " << c << "\n";
    return;
  }
  if (result.kind == ExperimentKind::kExpansion) {
    std::ofstream out(base_path + ".series.dat");
    if (!out) throw std::runtime_error("cannot write plot data: " + base_path);
    out << "# step mean_gamma\n";
    std::size_t steps = 0;
    for (const auto& r : result.records) steps = std::max(steps, r.gamma_sizes.size());
    for (std::size_t k = 0; k < steps; ++k) {
      double sum = 0;
      std::uint64_t cnt = 0;
      for (const auto& r : result.records) {
        if (k < r.gamma_sizes.size()) {
          sum += static_cast<double>(r.gamma_sizes[k]);
          ++cnt;
        }
      }
      out << k << " " << (cnt ? sum / static_cast<double>(cnt) : 0.0) << "\n";
    }
    return;
  }
  std::ofstream out(base_path + ".dat");
  out << "# violation_fraction analytic_bound\n";
  out << result.aggregate.violation_fraction << " " << result.aggregate.analytic_bound
      << "\n";
}

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kDiameter: return "diameter";
    case ExperimentKind::kTail: return "tail";
    case ExperimentKind::kExpansion: return "expansion";
    case ExperimentKind::kCoupling: return "coupling";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "diameter") return ExperimentKind::kDiameter;
  if (name == "tail") return ExperimentKind::kTail;
  if (name == "expansion") return ExperimentKind::kExpansion;
  if (name == "coupling") return ExperimentKind::kCoupling;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string regime_report_json_text(const RegimeReport& report) {
  return report_to_json(report).dump(2);
}

std::string delta_bounds_json_text(const DeltaBounds& bounds) {
  json witnesses = json::array();
  const auto witness_json = [](const Partition& p) {
    json cells = json::array();
    for (const auto& c : p.cells()) {
      if (c.is_block_kind()) {
        cells.push_back(c.blocks());
      } else {
        json pieces = json::array();
        for (const auto& piece : c.pieces()) pieces.push_back({piece.lo, piece.hi});
        cells.push_back(pieces);
      }
    }
    return cells;
  };
  json j{{"delta_u", hop_to_json(bounds.delta_u)},
         {"delta_l", hop_to_json(bounds.delta_l)},
         {"exact", bounds.exact},
         {"resolution", bounds.resolution}};
  if (bounds.witness_u) j["witness_u"] = witness_json(*bounds.witness_u);
  if (bounds.witness_l) j["witness_l"] = witness_json(*bounds.witness_l);
  return j.dump(2);
}

std::string aggregate_json_text(const ExperimentResult& result) {
  json j = aggregate_to_json(result.aggregate);
  j["kind"] = experiment_kind_name(result.kind);
  j["n"] = result.n;
  j["p"] = result.p;
  j["wall_seconds"] = result.wall_seconds;
  if (result.prediction) j["prediction"] = report_to_json(*result.prediction);
  return j.dump(2);
}

}  // namespace irg
