#include "irg/graphalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace irg {

namespace {

/// BFS returning the farthest vertex, its distance and the reached count.
struct Sweep {
  std::uint32_t farthest = 0;
  std::uint32_t ecc = 0;
  std::uint64_t reached = 0;
};

Sweep bfs_into(const SampledGraph& g, std::uint32_t source,
               std::vector<std::uint32_t>& dist, std::vector<std::uint32_t>& queue) {
  std::fill(dist.begin(), dist.end(), kDistInf);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  Sweep s{source, 0, 1};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    const std::uint32_t du = dist[u];
    for (const auto v : g.row(u)) {
      if (dist[v] == kDistInf) {
        dist[v] = du + 1;
        queue.push_back(v);
        ++s.reached;
        if (dist[v] > s.ecc) {
          s.ecc = dist[v];
          s.farthest = v;
        }
      }
    }
  }
  return s;
}

}  // namespace

std::vector<std::uint32_t> bfs_distances(const SampledGraph& graph, std::uint32_t source) {
  if (source >= graph.n) throw std::invalid_argument("bfs_distances: source out of range");
  std::vector<std::uint32_t> dist(graph.n);
  std::vector<std::uint32_t> queue;
  queue.reserve(graph.n);
  bfs_into(graph, source, dist, queue);
  return dist;
}

Connectivity connected(const SampledGraph& graph) {
  Connectivity out;
  if (graph.n == 0) {
    out.connected = true;
    return out;
  }
  std::vector<std::uint32_t> dist(graph.n, kDistInf);
  std::vector<std::uint32_t> queue;
  queue.reserve(graph.n);
  for (std::uint32_t v = 0; v < graph.n; ++v) {
    if (dist[v] != kDistInf) continue;
    std::uint64_t size = 1;
    dist[v] = 0;
    queue.clear();
    queue.push_back(v);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const auto w : graph.row(queue[head])) {
        if (dist[w] == kDistInf) {
          dist[w] = 1;
          queue.push_back(w);
          ++size;
        }
      }
    }
    out.component_sizes.push_back(size);
  }
  std::sort(out.component_sizes.rbegin(), out.component_sizes.rend());
  out.connected = out.component_sizes.size() == 1;
  return out;
}

DiameterResult exact_diameter(const SampledGraph& graph) {
  DiameterResult res{HopCount(0), 0};
  if (graph.n <= 1) return res;

  std::uint32_t root = 0;
  for (std::uint32_t v = 0; v < graph.n; ++v) {
    if (graph.degree(v) > graph.degree(root)) root = v;
  }

  std::vector<std::uint32_t> dist(graph.n), queue;
  queue.reserve(graph.n);
  const Sweep from_root = bfs_into(graph, root, dist, queue);
  ++res.bfs_sweeps;
  if (from_root.reached != graph.n) {
    res.diameter = HopCount::infinity();
    return res;
  }
  std::vector<std::uint32_t> root_level = dist;
  const std::uint32_t max_level = from_root.ecc;

  // Double sweep for the lower bound.
  const Sweep a = bfs_into(graph, from_root.farthest, dist, queue);
  ++res.bfs_sweeps;
  std::uint32_t lb = a.ecc;
  const Sweep b = bfs_into(graph, a.farthest, dist, queue);
  ++res.bfs_sweeps;
  lb = std::max(lb, b.ecc);

  // Eccentricity-bounded pruning: sweep root levels downward; vertices at
  // levels below i cannot push the diameter past 2(i-1).
  std::vector<std::uint32_t> order(graph.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return root_level[x] > root_level[y];
  });
  std::size_t at = 0;
  for (std::uint32_t level = max_level; level >= 1; --level) {
    // Unprocessed vertices all sit at levels <= level, so their pairwise
    // distances are at most 2 * level through the root.
    if (lb >= 2 * level) break;
    while (at < order.size() && root_level[order[at]] == level) {
      const Sweep s = bfs_into(graph, order[at], dist, queue);
      ++res.bfs_sweeps;
      lb = std::max(lb, s.ecc);
      ++at;
    }
  }
  res.diameter = HopCount(lb);
  return res;
}

// ---------------------------------------------------------------------------
// Expansion layers

bool ExpansionTrace::all_satisfied() const {
  return std::all_of(bound_satisfied.begin(), bound_satisfied.end(),
                     [](char c) { return c != 0; });
}

ExpansionTrace expansion_trace(const SampledGraph& graph, const Kernel& kernel,
                               const Partition& partition,
                               const std::vector<std::uint32_t>& walk, std::uint32_t u,
                               std::uint64_t phi, double omega,
                               std::uint64_t truncation_seed) {
  if (walk.empty()) throw std::invalid_argument("expansion_trace: empty walk");
  if (u >= graph.n) throw std::invalid_argument("expansion_trace: u out of range");
  const std::size_t len = walk.size() - 1;
  if (static_cast<double>(len) > std::ceil(omega))
    throw std::invalid_argument("expansion_trace: walk longer than omega");

  const PartitionGraph lower = lower_graph(kernel, partition);
  for (std::size_t k = 0; k + 1 < walk.size(); ++k) {
    if (walk[k] >= partition.size() || walk[k + 1] >= partition.size())
      throw std::invalid_argument("expansion_trace: walk cell out of range");
    if (!lower.adjacent(walk[k], walk[k + 1]))
      throw std::invalid_argument(
          "expansion_trace: walk steps outside the lower partition graph");
  }

  // Vertex -> cell, and per-cell population.
  std::vector<std::uint32_t> cell_of(graph.n);
  std::vector<std::uint64_t> cell_size(partition.size(), 0);
  for (std::uint32_t v = 0; v < graph.n; ++v) {
    cell_of[v] = static_cast<std::uint32_t>(partition.cell_of(type_value(graph.types, v)));
    ++cell_size[cell_of[v]];
  }
  if (cell_of[u] != walk.front())
    throw std::invalid_argument("expansion_trace: u is not in the first walk cell");

  ExpansionTrace tr;
  tr.walk = walk;
  tr.S = static_cast<double>(graph.n) * partition.min_measure() * lower.min_edge_value *
         graph.provenance.p / 4.0;
  const std::uint64_t t_cap = phi >= 2 ? phi - 2 : 0;

  std::vector<std::uint32_t> gamma{u};
  std::vector<char> in_prev(graph.n, 0);
  tr.gamma_sizes.push_back(1);
  for (std::size_t k = 0; k <= len; ++k) {
    const auto tk = static_cast<std::uint32_t>(std::min<std::uint64_t>(k, t_cap));
    tr.t.push_back(tk);
    tr.thresholds.push_back(std::pow(tr.S, static_cast<double>(tk)));
    if (k > 0) tr.gamma_sizes.push_back(gamma.size());
    tr.bound_satisfied.push_back(
        static_cast<double>(tr.gamma_sizes[k]) >= tr.thresholds[k] ? 1 : 0);

    // Truncate to half the current cell's population, then expand into the
    // next walk cell.
    const std::uint64_t cap = cell_size[walk[k]] / 2;
    if (gamma.size() > cap) {
      auto eng = rng::make_engine(rng::derive(truncation_seed, rng::kPhaseTruncation, k));
      for (std::size_t i = 0; i < cap; ++i) {
        const std::uint64_t j = i + rng::uniform_below(eng, gamma.size() - i);
        std::swap(gamma[i], gamma[j]);
      }
      gamma.resize(cap);
    }
    tr.gamma_prime_sizes.push_back(gamma.size());
    if (k == len) break;

    for (const auto v : gamma) in_prev[v] = 1;
    std::vector<std::uint32_t> next;
    std::vector<char> seen(graph.n, 0);
    const std::uint32_t target = walk[k + 1];
    for (const auto v : gamma) {
      for (const auto w : graph.row(v)) {
        if (cell_of[w] == target && !in_prev[w] && !seen[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
      }
    }
    for (const auto v : gamma) in_prev[v] = 0;
    gamma = std::move(next);
  }
  return tr;
}

std::uint64_t neighbor_hit_count(const SampledGraph& graph,
                                 const std::vector<std::uint32_t>& u_set,
                                 std::size_t target_cell, const Partition& partition) {
  if (u_set.empty()) throw std::invalid_argument("neighbor_hit_count: empty U");
  if (target_cell >= partition.size())
    throw std::invalid_argument("neighbor_hit_count: cell index out of range");

  std::vector<std::uint32_t> cell_of(graph.n);
  std::vector<std::uint64_t> cell_size(partition.size(), 0);
  for (std::uint32_t v = 0; v < graph.n; ++v) {
    cell_of[v] = static_cast<std::uint32_t>(partition.cell_of(type_value(graph.types, v)));
    ++cell_size[cell_of[v]];
  }
  const std::uint32_t source_cell = cell_of[u_set.front()];
  for (const auto v : u_set) {
    if (v >= graph.n || cell_of[v] != source_cell)
      throw std::invalid_argument("neighbor_hit_count: U is not inside a single cell");
  }
  if (2 * u_set.size() > cell_size[source_cell])
    throw std::invalid_argument("neighbor_hit_count: U exceeds half of its cell");

  std::vector<char> in_u(graph.n, 0);
  for (const auto v : u_set) in_u[v] = 1;
  std::vector<char> hit(graph.n, 0);
  std::uint64_t count = 0;
  for (const auto v : u_set) {
    for (const auto w : graph.row(v)) {
      if (!in_u[w] && !hit[w] && cell_of[w] == target_cell) {
        hit[w] = 1;
        ++count;
      }
    }
  }
  return count;
}

double s_ij(double n, double mu_j, double k_l, double p, std::uint64_t u_size) {
  const double q = k_l * p;
  // 1 - (1-q)^u via expm1/log1p for small q.
  const double miss = std::expm1(static_cast<double>(u_size) * std::log1p(-q));
  return n * mu_j * (-miss);
}

}  // namespace irg
