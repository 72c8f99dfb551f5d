#include "irg/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace irg {

namespace {
constexpr double kCoverTol = 1e-9;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(TypeSpace space, std::vector<Cell> cells,
                     std::vector<double> measures)
    : space_(std::move(space)), cells_(std::move(cells)), measures_(std::move(measures)) {
  build_lookup();
}

Partition Partition::of(TypeSpace space, std::vector<Cell> cells) {
  if (cells.empty()) throw std::invalid_argument("Partition: no cells");
  std::vector<double> measures;
  measures.reserve(cells.size());
  if (space.is_finite()) {
    std::vector<char> used(space.type_count(), 0);
    for (const auto& c : cells) {
      if (!c.is_block_kind())
        throw std::invalid_argument("Partition: cell kind does not match the space");
      double m = 0;
      for (auto b : c.blocks()) {
        if (b >= space.type_count())
          throw std::invalid_argument("Partition: block index out of range");
        if (used[b]) throw std::invalid_argument("Partition: cells overlap");
        used[b] = 1;
        m += space.weights()[b];
      }
      measures.push_back(m);
    }
    if (std::find(used.begin(), used.end(), 0) != used.end())
      throw std::invalid_argument("Partition: cells do not cover the space");
  } else {
    std::vector<std::pair<double, double>> pieces;
    for (const auto& c : cells) {
      if (c.is_block_kind())
        throw std::invalid_argument("Partition: cell kind does not match the space");
      double m = 0;
      for (const auto& p : c.pieces()) {
        if (p.lo < -kCoverTol || p.hi > space.length() + kCoverTol)
          throw std::invalid_argument("Partition: piece outside the interval");
        pieces.emplace_back(p.lo, p.hi);
        m += space.density().mass(p.lo, p.hi);
      }
      if (!(m > 0)) throw std::invalid_argument("Partition: zero-measure cell");
      measures.push_back(m);
    }
    std::sort(pieces.begin(), pieces.end());
    double at = 0;
    for (const auto& [lo, hi] : pieces) {
      if (lo > at + kCoverTol)
        throw std::invalid_argument("Partition: gap in interval coverage");
      if (lo < at - kCoverTol) throw std::invalid_argument("Partition: cells overlap");
      at = hi;
    }
    if (std::fabs(at - space.length()) > kCoverTol)
      throw std::invalid_argument("Partition: cells do not cover the interval");
  }
  return Partition(std::move(space), std::move(cells), std::move(measures));
}

Partition Partition::blocks_of(const Kernel& kernel) {
  if (!kernel.is_steplike())
    throw std::invalid_argument("Partition: kernel has no block structure");
  const auto& space = kernel.space();
  std::vector<Cell> cells;
  const std::size_t m = kernel.block_count();
  if (space.is_finite()) {
    for (std::uint32_t b = 0; b < m; ++b) cells.push_back(Cell::of_blocks({b}));
  } else if (m == 1) {
    cells.push_back(Cell::of_interval(0.0, space.length()));
  } else {
    const auto& bp = kernel.step_breakpoints();
    for (std::size_t b = 0; b < m; ++b)
      cells.push_back(Cell::of_interval(bp[b], bp[b + 1]));
  }
  return of(space, std::move(cells));
}

Partition Partition::uniform_grid(const TypeSpace& space, std::size_t cell_count) {
  if (!space.is_interval())
    throw std::invalid_argument("Partition: uniform grids need an interval space");
  if (cell_count == 0) throw std::invalid_argument("Partition: empty grid");
  const double L = space.length();
  std::vector<Cell> cells;
  cells.reserve(cell_count);
  for (std::size_t i = 0; i < cell_count; ++i) {
    cells.push_back(Cell::of_interval(static_cast<double>(i) * L / cell_count,
                                      static_cast<double>(i + 1) * L / cell_count));
  }
  return of(space, std::move(cells));
}

Partition Partition::from_breakpoints(const TypeSpace& space,
                                      std::vector<double> breakpoints) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("Partition: need at least two breakpoints");
  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    cells.push_back(Cell::of_interval(breakpoints[i], breakpoints[i + 1]));
  return of(space, std::move(cells));
}

Partition Partition::from_groups(const TypeSpace& space,
                                 std::vector<std::vector<std::uint32_t>> groups) {
  std::vector<Cell> cells;
  for (auto& g : groups) cells.push_back(Cell::of_blocks(std::move(g)));
  return of(space, std::move(cells));
}

double Partition::min_measure() const {
  return *std::min_element(measures_.begin(), measures_.end());
}

void Partition::build_lookup() {
  if (space_.is_finite()) {
    block_to_cell_.assign(space_.type_count(), 0);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      for (auto b : cells_[i].blocks()) block_to_cell_[b] = static_cast<std::uint32_t>(i);
    }
  } else {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      for (const auto& p : cells_[i].pieces())
        lookup_.emplace_back(p.lo, p.hi, static_cast<std::uint32_t>(i));
    }
    std::sort(lookup_.begin(), lookup_.end());
  }
}

std::size_t Partition::cell_of(double point) const {
  if (space_.is_finite()) {
    const auto b = static_cast<std::size_t>(point);
    if (b >= block_to_cell_.size())
      throw std::domain_error("Partition: point outside the space");
    return block_to_cell_[b];
  }
  auto it = std::upper_bound(lookup_.begin(), lookup_.end(),
                             std::make_tuple(point, std::numeric_limits<double>::max(),
                                             std::numeric_limits<std::uint32_t>::max()));
  if (it != lookup_.begin()) {
    const auto& [lo, hi, idx] = *std::prev(it);
    if (point >= lo && (point < hi || point == std::get<1>(lookup_.back()))) return idx;
  }
  throw std::domain_error("Partition: point not covered by any cell");
}

// ---------------------------------------------------------------------------
// Refinement

bool is_refinement(const Partition& a, const Partition& b) {
  if (!a.space().same_as(b.space()))
    throw std::domain_error("is_refinement: partitions live on different spaces");
  for (const auto& ca : a.cells()) {
    bool inside = false;
    for (const auto& cb : b.cells()) {
      if (ca.subset_of(cb)) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

Partition common_refinement(const Partition& a, const Partition& b) {
  if (!a.space().same_as(b.space()))
    throw std::domain_error("common_refinement: partitions live on different spaces");
  std::vector<Cell> cells;
  for (const auto& ca : a.cells()) {
    for (const auto& cb : b.cells()) {
      if (auto c = ca.intersect(cb)) {
        // Positive measure only.
        if (!c->is_block_kind()) {
          double m = 0;
          for (const auto& p : c->pieces()) m += a.space().density().mass(p.lo, p.hi);
          if (!(m > kCoverTol)) continue;
        }
        cells.push_back(std::move(*c));
      }
    }
  }
  return Partition::of(a.space(), std::move(cells));
}

// ---------------------------------------------------------------------------
// Partition graphs

std::size_t PartitionGraph::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < size(); ++j)
    if (adjacent(i, j)) ++d;
  return d;
}

std::pair<PartitionGraph, PartitionGraph> partition_graphs(const Kernel& kernel,
                                                           const Partition& partition) {
  if (!kernel.space().same_as(partition.space()))
    throw std::domain_error("partition_graphs: partition is not on the kernel's space");
  const std::size_t m = partition.size();
  auto shared = std::make_shared<const Partition>(partition);
  PartitionGraph lo{GraphFlavor::kLower, shared, std::vector<char>(m * m, 0),
                    std::vector<double>(m * m, 0.0), 0, partition.min_measure(), true};
  PartitionGraph up{GraphFlavor::kUpper, shared, std::vector<char>(m * m, 0),
                    std::vector<double>(m * m, 0.0), 0, partition.min_measure(), true};
  double lo_min = 1.0, up_min = 1.0;
  bool lo_any = false, up_any = false;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const CellBounds cb = cell_bounds(kernel, partition.cells()[i], partition.cells()[j]);
      lo.exact = lo.exact && cb.exact;
      up.exact = up.exact && cb.exact;
      if (cb.lower > 0) {
        lo.adjacency[i * m + j] = lo.adjacency[j * m + i] = 1;
        lo.edge_values[i * m + j] = lo.edge_values[j * m + i] = cb.lower;
        lo_min = std::min(lo_min, cb.lower);
        lo_any = true;
      }
      if (cb.upper > 0) {
        up.adjacency[i * m + j] = up.adjacency[j * m + i] = 1;
        up.edge_values[i * m + j] = up.edge_values[j * m + i] = cb.upper;
        up_min = std::min(up_min, cb.upper);
        up_any = true;
      }
    }
  }
  lo.min_edge_value = lo_any ? lo_min : 0.0;
  up.min_edge_value = up_any ? up_min : 0.0;
  return {std::move(lo), std::move(up)};
}

PartitionGraph lower_graph(const Kernel& kernel, const Partition& partition) {
  return partition_graphs(kernel, partition).first;
}

PartitionGraph upper_graph(const Kernel& kernel, const Partition& partition) {
  return partition_graphs(kernel, partition).second;
}

HopCount graph_diameter(const PartitionGraph& g) {
  const std::size_t m = g.size();
  HopCount best(0);
  std::vector<std::uint32_t> dist(m);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < m; ++s) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < m; ++v) {
        if (v != u && g.adjacent(u, v) && dist[v] == UINT32_MAX) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t v = 0; v < m; ++v) {
      if (dist[v] == UINT32_MAX) return HopCount::infinity();
      best = max(best, HopCount(dist[v]));
    }
  }
  return best;
}

bool exact_length_walk_exists(const PartitionGraph& g, std::size_t i, std::size_t j,
                              std::uint64_t length) {
  const std::size_t m = g.size();
  if (i >= m || j >= m) throw std::invalid_argument("exact_length_walk: bad cell index");
  if (length == 0) return i == j;
  // Parity-doubled BFS: node (v, b) is reachable at parity b; every edge,
  // self-loops included, flips parity. A walk of length exactly L exists iff
  // some walk matches L's parity at no more than L steps and can be padded
  // by going back and forth over an incident edge.
  if (i == j && g.degree(i) == 0) return false;
  const std::size_t n2 = 2 * m;
  std::vector<std::uint32_t> dist(n2, UINT32_MAX);
  std::deque<std::size_t> queue;
  dist[2 * i] = 0;
  queue.push_back(2 * i);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const std::size_t u = cur / 2;
    const std::size_t parity = cur % 2;
    for (std::size_t v = 0; v < m; ++v) {
      if (!g.adjacent(u, v)) continue;
      const std::size_t nxt = 2 * v + (1 - parity);
      if (dist[nxt] == UINT32_MAX) {
        dist[nxt] = dist[cur] + 1;
        queue.push_back(nxt);
      }
    }
  }
  const std::size_t target = 2 * j + (length % 2);
  return dist[target] != UINT32_MAX && dist[target] <= length;
}

// ---------------------------------------------------------------------------
// Delta bounds

namespace {

DeltaBounds step_delta(const Kernel& kernel) {
  const std::size_t m = kernel.block_count();
  DeltaBounds out;
  out.exact = true;
  if (m == 1) {
    // A single positive block: every proper split yields complete partition
    // graphs, so both extremal diameters are 1.
    out.delta_u = HopCount(1);
    out.delta_l = HopCount(1);
    Partition witness = kernel.space().is_interval()
                            ? Partition::uniform_grid(kernel.space(), 2)
                            : Partition::blocks_of(kernel);
    out.witness_u = witness;
    out.witness_l = std::move(witness);
    out.resolution = out.witness_u->size();
    return out;
  }
  Partition blocks = Partition::blocks_of(kernel);
  auto [lo, up] = partition_graphs(kernel, blocks);
  // On single-block cells the lower and upper graphs coincide; coarsenings
  // can only shrink the upper diameter and grow the lower one, so the block
  // partition attains both extremes.
  out.delta_u = graph_diameter(up);
  out.delta_l = graph_diameter(lo);
  out.witness_u = blocks;
  out.witness_l = std::move(blocks);
  out.resolution = m;
  return out;
}

DeltaBounds grid_delta(const Kernel& kernel, const DeltaOptions& options) {
  DeltaBounds out;
  out.exact = false;
  HopCount du(0);
  bool du_seen = false;
  HopCount dl = HopCount::infinity();
  std::vector<std::pair<HopCount, HopCount>> history;
  std::size_t cells = options.grid_start;
  for (int round = 0; round < options.grid_rounds; ++round, cells *= 2) {
    Partition grid = Partition::uniform_grid(kernel.space(), cells);
    auto [lo, up] = partition_graphs(kernel, grid);
    const HopCount d_up = graph_diameter(up);
    const HopCount d_lo = graph_diameter(lo);
    // A disconnected upper graph at coarse resolution carries no upper-side
    // information; the finite rounds drive the estimate.
    if (d_up.is_finite()) {
      du = du_seen ? max(du, d_up) : d_up;
      du_seen = true;
    }
    dl = min(dl, d_lo);
    out.resolution = cells;
    history.emplace_back(du_seen ? du : HopCount::infinity(), dl);
    const std::size_t h = history.size();
    if (h >= 3 && history[h - 1] == history[h - 2] && history[h - 2] == history[h - 3])
      break;
  }
  out.delta_u = du_seen ? du : HopCount::infinity();
  out.delta_l = dl;
  return out;
}

}  // namespace

DeltaBounds delta_bounds(const Kernel& kernel, const DeltaOptions& options) {
  if (!is_irreducible(kernel).irreducible) {
    DeltaBounds out;
    out.delta_u = HopCount::infinity();
    out.delta_l = HopCount::infinity();
    out.exact = kernel.is_steplike();
    return out;
  }
  if (kernel.is_steplike()) return step_delta(kernel);
  return grid_delta(kernel, options);
}

bool check_diff2(const DeltaBounds& bounds) {
  if (bounds.delta_l.is_infinite())
    throw std::invalid_argument("check_diff2: delta_l must be finite");
  return bounds.delta_u <= bounds.delta_l && bounds.delta_l <= bounds.delta_u + 2;
}

// ---------------------------------------------------------------------------
// Walk condition

void enumerate_set_partitions(
    std::size_t m, const std::function<bool(const std::vector<std::uint32_t>&)>& visit) {
  // Restricted growth strings: a[0] = 0 and a[i] <= max(a[0..i-1]) + 1.
  std::vector<std::uint32_t> a(m, 0);
  for (;;) {
    if (!visit(a)) return;
    bool advanced = false;
    std::size_t i = m;
    while (i-- > 1) {
      std::uint32_t prefix_max = 0;
      for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, a[j]);
      if (a[i] <= prefix_max) {
        ++a[i];
        for (std::size_t j = i + 1; j < m; ++j) a[j] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) return;
  }
}

namespace {

struct SmallGraph {
  std::size_t m;
  std::vector<char> adj;
  bool adjacent(std::size_t i, std::size_t j) const { return adj[i * m + j] != 0; }
};

/// Witness pair with no walk of length exactly `len`, if any.
std::optional<std::pair<std::size_t, std::size_t>> missing_exact_walk(
    const SmallGraph& g, std::uint64_t len) {
  const std::size_t m = g.m;
  for (std::size_t i = 0; i < m; ++i) {
    // Parity BFS from i.
    std::vector<std::uint32_t> dist(2 * m, UINT32_MAX);
    std::deque<std::size_t> queue;
    dist[2 * i] = 0;
    queue.push_back(2 * i);
    std::size_t deg = 0;
    for (std::size_t v = 0; v < m; ++v) deg += g.adjacent(i, v);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const std::size_t u = cur / 2;
      const std::size_t parity = cur % 2;
      for (std::size_t v = 0; v < m; ++v) {
        if (!g.adjacent(u, v)) continue;
        const std::size_t nxt = 2 * v + (1 - parity);
        if (dist[nxt] == UINT32_MAX) {
          dist[nxt] = dist[cur] + 1;
          queue.push_back(nxt);
        }
      }
    }
    for (std::size_t j = i; j < m; ++j) {
      bool ok;
      if (len == 0) {
        ok = i == j;
      } else if (i == j && deg == 0) {
        ok = false;
      } else {
        const std::size_t t = 2 * j + (len % 2);
        ok = dist[t] != UINT32_MAX && dist[t] <= len;
      }
      if (!ok) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace

WalkConditionResult walk_condition(const Kernel& kernel, std::uint64_t phi) {
  WalkConditionResult out;
  if (!kernel.is_steplike()) {
    out.verdict = WalkConditionVerdict::kUnknown;
    return out;
  }
  const std::size_t m = kernel.block_count();
  if (m > 12)
    throw std::invalid_argument("walk_condition: block counts above 12 are unsupported");

  const auto check_groups =
      [&](const std::vector<std::vector<std::uint32_t>>& groups) -> bool {
    const std::size_t g = groups.size();
    SmallGraph sg{g, std::vector<char>(g * g, 0)};
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = i; j < g; ++j) {
        bool pos = false;
        for (auto a : groups[i]) {
          for (auto b : groups[j]) pos = pos || kernel.block_value(a, b) > 0;
        }
        sg.adj[i * g + j] = sg.adj[j * g + i] = pos;
      }
    }
    if (auto w = missing_exact_walk(sg, phi)) {
      out.verdict = WalkConditionVerdict::kHolds;
      out.witness_groups = groups;
      out.witness_i = static_cast<int>(w->first);
      out.witness_j = static_cast<int>(w->second);
      return true;
    }
    return false;
  };

  // The block partition first: for step kernels, walks between sub-block
  // cells project onto block walks and lift back, so it is the most likely
  // witness carrier.
  std::vector<std::vector<std::uint32_t>> blocks(m);
  for (std::uint32_t b = 0; b < m; ++b) blocks[b] = {b};
  if (check_groups(blocks)) return out;

  bool found = false;
  enumerate_set_partitions(m, [&](const std::vector<std::uint32_t>& rgs) {
    std::uint32_t parts = 0;
    for (auto v : rgs) parts = std::max(parts, v + 1);
    if (parts == m) return true;  // the block partition, already checked
    std::vector<std::vector<std::uint32_t>> groups(parts);
    for (std::uint32_t b = 0; b < m; ++b) groups[rgs[b]].push_back(b);
    if (check_groups(groups)) {
      found = true;
      return false;
    }
    return true;
  });
  if (!found) out.verdict = WalkConditionVerdict::kFails;
  return out;
}

}  // namespace irg
