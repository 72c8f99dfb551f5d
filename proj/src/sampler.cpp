#include "irg/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace irg {

double default_omega(std::uint64_t n) {
  const double ll = std::log(std::log(std::max<double>(n, 3)));
  return std::max(1.0, ll);
}

double resolved_omega(const SampleParams& params) {
  return params.omega ? *params.omega : default_omega(params.n);
}

double type_value(const TypeAssignment& types, std::uint32_t v) {
  if (const auto* b = std::get_if<std::vector<std::uint32_t>>(&types))
    return static_cast<double>((*b)[v]);
  return std::get<std::vector<double>>(types)[v];
}

std::uint64_t type_digest(const TypeAssignment& types) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](std::uint64_t bits) {
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  if (const auto* b = std::get_if<std::vector<std::uint32_t>>(&types)) {
    for (auto v : *b) mix(v);
  } else {
    for (double v : std::get<std::vector<double>>(types)) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, sizeof(bits));
      mix(bits);
    }
  }
  return h;
}

bool SampledGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
  const auto r = row(u);
  return std::binary_search(r.begin(), r.end(), v);
}

SampledGraph SampledGraph::from_edges(
    std::uint32_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
    TypeAssignment types, Provenance provenance) {
  SampledGraph g;
  g.n = n;
  g.edge_count = edges.size();
  g.types = std::move(types);
  g.provenance = std::move(provenance);
  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    ++g.offsets[u + 1];
    ++g.offsets[v + 1];
  }
  for (std::size_t i = 1; i < g.offsets.size(); ++i) g.offsets[i] += g.offsets[i - 1];
  g.neighbors.resize(2 * edges.size());
  std::vector<std::uint64_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    g.neighbors[fill[u]++] = v;
    g.neighbors[fill[v]++] = u;
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    std::sort(g.neighbors.begin() + static_cast<std::ptrdiff_t>(g.offsets[v]),
              g.neighbors.begin() + static_cast<std::ptrdiff_t>(g.offsets[v + 1]));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Types

TypeAssignment sample_types(const TypeSpace& space, std::uint64_t n, rng::Engine& eng) {
  if (space.is_finite()) {
    const auto& w = space.weights();
    std::vector<double> cum(w.size());
    double acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      cum[i] = acc;
    }
    cum.back() = 1.0;
    std::vector<std::uint32_t> types(n);
    for (std::uint64_t v = 0; v < n; ++v) {
      const double u = rng::uniform01(eng);
      types[v] = static_cast<std::uint32_t>(
          std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    }
    return types;
  }
  const auto& d = space.density();
  std::vector<double> cum(d.values.size());
  double acc = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    acc += d.values[i] * (d.breakpoints[i + 1] - d.breakpoints[i]);
    cum[i] = acc;
  }
  cum.back() = 1.0;
  std::vector<double> types(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    const double u = rng::uniform01(eng);
    const std::size_t piece = static_cast<std::size_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    const double lo_mass = piece == 0 ? 0.0 : cum[piece - 1];
    const double x =
        d.breakpoints[piece] + (u - lo_mass) / d.values[piece];
    types[v] = std::min(x, space.length());
  }
  return types;
}

// ---------------------------------------------------------------------------
// Edge sampling

namespace {

using EdgeVec = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// Decode a linear index over unordered pairs {i < j} of one list.
std::pair<std::uint64_t, std::uint64_t> triangular_decode(std::uint64_t t) {
  // Largest j with j(j-1)/2 <= t; the pair is (t - j(j-1)/2, j).
  auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
  while (j * (j - 1) / 2 > t) --j;
  while ((j + 1) * j / 2 <= t) ++j;
  return {t - j * (j - 1) / 2, j};
}

struct PairTask {
  std::uint32_t a;
  std::uint32_t b;  // group indices, a <= b
  double rate;      // candidate probability per pair
  double bound;     // kernel upper bound used for thinning (0 = exact rate)
};

/// Runs one group-pair task: geometric skipping over the implicit pair
/// enumeration at the candidate rate, then optional thinning by the exact
/// kernel probability. Appends accepted edges as (min, max) vertex ids.
template <typename AcceptFn>
void run_pair_task(const std::vector<std::uint32_t>& va,
                   const std::vector<std::uint32_t>& vb, bool same, double rate,
                   rng::Engine& eng, const AcceptFn& accept, EdgeVec& out) {
  if (rate <= 0) return;
  const std::uint64_t sa = va.size();
  const std::uint64_t sb = vb.size();
  const std::uint64_t total = same ? (sa < 2 ? 0 : sa * (sa - 1) / 2) : sa * sb;
  if (total == 0) return;
  std::uint64_t pos = 0;
  bool first = true;
  for (;;) {
    const std::uint64_t skip = rng::geometric_skip(eng, rate);
    if (skip == UINT64_MAX) break;
    pos += skip + (first ? 0 : 1);
    first = false;
    if (pos >= total) break;
    std::uint32_t u, v;
    if (same) {
      const auto [i, j] = triangular_decode(pos);
      u = va[i];
      v = va[j];
    } else {
      u = va[pos / sb];
      v = vb[pos % sb];
    }
    if (accept(eng, u, v)) {
      if (u > v) std::swap(u, v);
      out.emplace_back(u, v);
    }
  }
}

std::vector<std::vector<std::uint32_t>> group_vertices(const Kernel& kernel,
                                                       const TypeAssignment& types,
                                                       std::uint64_t n,
                                                       std::size_t bucket_count) {
  std::vector<std::vector<std::uint32_t>> groups;
  if (kernel.is_steplike()) {
    groups.resize(kernel.block_count());
    for (std::uint64_t v = 0; v < n; ++v) {
      groups[kernel.block_of(type_value(types, static_cast<std::uint32_t>(v)))].push_back(
          static_cast<std::uint32_t>(v));
    }
  } else {
    groups.resize(bucket_count);
    const double L = kernel.space().length();
    const auto& pos = std::get<std::vector<double>>(types);
    for (std::uint64_t v = 0; v < n; ++v) {
      auto b = static_cast<std::size_t>(pos[v] / L * static_cast<double>(bucket_count));
      if (b >= bucket_count) b = bucket_count - 1;
      groups[b].push_back(static_cast<std::uint32_t>(v));
    }
  }
  return groups;
}

}  // namespace

SampledGraph sample_graph(const Kernel& kernel, const SampleParams& params) {
  if (params.n < 1) throw std::invalid_argument("sample_graph: n must be at least 1");
  if (!(params.p >= 0 && params.p <= 1))
    throw std::invalid_argument("sample_graph: p outside [0, 1]");
  if (params.n > UINT32_MAX)
    throw std::invalid_argument("sample_graph: n exceeds the 32-bit vertex limit");

  auto types_eng = rng::make_engine(rng::derive(params.seed, rng::kPhaseTypes));
  TypeAssignment types = sample_types(kernel.space(), params.n, types_eng);

  constexpr std::size_t kBuckets = 64;
  const auto groups = group_vertices(kernel, types, params.n, kBuckets);
  const std::size_t g = groups.size();
  const bool steplike = kernel.is_steplike();
  const double L = kernel.space().is_interval() ? kernel.space().length() : 0;

  std::vector<PairTask> tasks;
  for (std::uint32_t a = 0; a < g; ++a) {
    for (std::uint32_t b = a; b < g; ++b) {
      if (groups[a].empty() || groups[b].empty()) continue;
      double rate, bound;
      if (steplike) {
        bound = 0;  // exact rate, no thinning
        rate = kernel.block_value(a, b) * params.p;
      } else {
        const double xa0 = a * L / kBuckets, xa1 = (a + 1) * L / kBuckets;
        const double xb0 = b * L / kBuckets, xb1 = (b + 1) * L / kBuckets;
        bound = kernel.sup_bound_on_rect(xa0, xa1, xb0, xb1);
        rate = std::min(1.0, bound * params.p);
      }
      if (rate > 0) tasks.push_back({a, b, rate, bound});
    }
  }

  std::vector<EdgeVec> buffers(tasks.size());
  const auto run_task = [&](std::size_t t) {
    const PairTask& task = tasks[t];
    auto eng = rng::make_engine(rng::derive(params.seed, rng::kPhaseEdges, task.a, task.b));
    const auto accept_all = [](rng::Engine&, std::uint32_t, std::uint32_t) { return true; };
    const auto accept_thinned = [&](rng::Engine& e, std::uint32_t u, std::uint32_t v) {
      // Candidate arrived at rate min(1, bound*p); keep it with probability
      // K(Xu, Xv)*p / rate.
      const double kv = kernel.eval(type_value(types, u), type_value(types, v));
      return rng::uniform01(e) * task.rate < kv * params.p;
    };
    if (steplike) {
      run_pair_task(groups[task.a], groups[task.b], task.a == task.b, task.rate, eng,
                    accept_all, buffers[t]);
    } else {
      run_pair_task(groups[task.a], groups[task.b], task.a == task.b, task.rate, eng,
                    accept_thinned, buffers[t]);
    }
  };

  const unsigned width = std::max(1u, params.threads);
  if (width == 1 || tasks.size() <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (unsigned w = 0; w < width; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= tasks.size()) return;
          run_task(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  EdgeVec edges;
  std::size_t total = 0;
  for (const auto& buf : buffers) total += buf.size();
  edges.reserve(total);
  for (auto& buf : buffers) {
    edges.insert(edges.end(), buf.begin(), buf.end());
    EdgeVec().swap(buf);
  }
  return SampledGraph::from_edges(static_cast<std::uint32_t>(params.n), std::move(edges),
                                  std::move(types),
                                  Provenance{kernel.id(), params.n, params.p, params.seed});
}

std::pair<SampledGraph, SampledGraph> coupled_pair(const Kernel& kernel,
                                                   const SampleParams& params) {
  if (params.n < 1) throw std::invalid_argument("coupled_pair: n must be at least 1");
  if (!(params.p >= 0 && params.p <= 1))
    throw std::invalid_argument("coupled_pair: p outside [0, 1]");

  auto types_eng = rng::make_engine(rng::derive(params.seed, rng::kPhaseTypes));
  TypeAssignment types = sample_types(kernel.space(), params.n, types_eng);

  // One shared uniform per pair: a pair with U < p is a dense-graph edge and
  // additionally a kernel edge when U < K(Xi, Xj) p, realized here as a
  // conditional coin at probability K given the candidate.
  EdgeVec er_edges, kernel_edges;
  auto eng = rng::make_engine(rng::derive(params.seed, rng::kPhaseCoupling));
  const std::uint64_t n = params.n;
  const std::uint64_t total = n < 2 ? 0 : n * (n - 1) / 2;
  std::uint64_t pos = 0;
  bool first = true;
  if (params.p > 0 && total > 0) {
    for (;;) {
      const std::uint64_t skip = rng::geometric_skip(eng, params.p);
      if (skip == UINT64_MAX) break;
      pos += skip + (first ? 0 : 1);
      first = false;
      if (pos >= total) break;
      const auto [i, j] = triangular_decode(pos);
      const auto u = static_cast<std::uint32_t>(i);
      const auto v = static_cast<std::uint32_t>(j);
      er_edges.emplace_back(u, v);
      const double kv = kernel.eval(type_value(types, u), type_value(types, v));
      if (rng::uniform01(eng) < kv) kernel_edges.emplace_back(u, v);
    }
  }
  Provenance prov{kernel.id(), params.n, params.p, params.seed};
  Provenance er_prov{"constant(c=1)", params.n, params.p, params.seed};
  auto gk = SampledGraph::from_edges(static_cast<std::uint32_t>(n), std::move(kernel_edges),
                                     types, std::move(prov));
  auto ge = SampledGraph::from_edges(static_cast<std::uint32_t>(n), std::move(er_edges),
                                     std::move(types), std::move(er_prov));
  return {std::move(gk), std::move(ge)};
}

// ---------------------------------------------------------------------------
// Edge-list files

void write_edge_list(const SampledGraph& graph, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write edge list: " + path);
  for (std::uint32_t v = 0; v < graph.n; ++v) {
    for (const auto u : graph.row(v)) {
      if (u > v) std::fprintf(f, "%u %u\n", v, u);
    }
  }
  std::fclose(f);

  nlohmann::json meta{{"schema", "irg-graph-meta/1"},
                      {"kernel", graph.provenance.kernel_id},
                      {"n", graph.n},
                      {"p", graph.provenance.p},
                      {"seed", graph.provenance.seed},
                      {"edges", graph.edge_count},
                      {"type_digest", type_digest(graph.types)}};
  std::ofstream mf(path + ".meta.json");
  if (!mf) throw std::runtime_error("cannot write sidecar: " + path + ".meta.json");
  mf << meta.dump(2) << "\n";
}

SampledGraph read_edge_list(const std::string& path, std::optional<std::uint32_t> n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  if (!n) {
    std::ifstream mf(path + ".meta.json");
    if (mf) {
      nlohmann::json meta;
      mf >> meta;
      if (meta.contains("n")) n = meta["n"].get<std::uint32_t>();
    }
  }
  EdgeVec edges;
  std::uint32_t max_id = 0;
  std::uint64_t u, v;
  while (in >> u >> v) {
    if (u == v) throw std::runtime_error("edge list has a self-loop: " + path);
    if (u > v) std::swap(u, v);
    if (v > UINT32_MAX) throw std::runtime_error("edge list vertex id too large");
    edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    max_id = std::max(max_id, static_cast<std::uint32_t>(v));
  }
  const std::uint32_t count = n ? *n : (edges.empty() ? 0 : max_id + 1);
  return SampledGraph::from_edges(count, std::move(edges), TypeAssignment{},
                                  Provenance{"file:" + path, count, 0, 0});
}

}  // namespace irg
