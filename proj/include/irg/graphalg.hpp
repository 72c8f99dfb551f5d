#pragma once

#include <cstdint>
#include <vector>

#include "irg/hops.hpp"
#include "irg/partition.hpp"
#include "irg/sampler.hpp"

namespace irg {

/// Unreachable marker in distance arrays (32-bit widths suffice for the
/// supported vertex counts).
inline constexpr std::uint32_t kDistInf = UINT32_MAX;

/// Distances from the source; kDistInf for unreachable vertices.
std::vector<std::uint32_t> bfs_distances(const SampledGraph& graph, std::uint32_t source);

struct Connectivity {
  bool connected = false;
  std::vector<std::uint64_t> component_sizes;  // descending
};

Connectivity connected(const SampledGraph& graph);

struct DiameterResult {
  HopCount diameter;
  std::uint64_t bfs_sweeps = 0;
};

/// Exact diameter: double-sweep lower bound, then eccentricity-bounded
/// pruning from a high-degree root, degrading to all-sources BFS only when
/// the pruning makes no progress. Infinite when disconnected.
DiameterResult exact_diameter(const SampledGraph& graph);

/// Layer-growth record along a fixed cell walk: gamma_sizes[k] counts the
/// fresh vertices of the k-th walk cell adjacent to the (possibly truncated)
/// previous layer, and each size is compared against S^t(k) where
/// S = n * min-cell-measure * min-lower-edge-value * p / 4.
struct ExpansionTrace {
  std::vector<std::uint32_t> walk;
  std::vector<std::uint64_t> gamma_sizes;
  std::vector<std::uint64_t> gamma_prime_sizes;
  double S = 0;
  std::vector<std::uint32_t> t;
  std::vector<double> thresholds;      // S^t(k)
  std::vector<char> bound_satisfied;   // gamma_sizes[k] >= thresholds[k]
  bool all_satisfied() const;
};

/// Runs the layer recursion from u along the walk. The walk must step along
/// edges of the lower partition graph (self-steps need a recorded loop), u
/// must carry the type of the first cell, and the walk may not be longer
/// than omega. Truncation to half a cell's population picks a uniformly
/// random subset from its own stream, independent of edge sampling.
ExpansionTrace expansion_trace(const SampledGraph& graph, const Kernel& kernel,
                               const Partition& partition,
                               const std::vector<std::uint32_t>& walk, std::uint32_t u,
                               std::uint64_t phi, double omega,
                               std::uint64_t truncation_seed);

/// Exact count of vertices in the target cell, outside U, with a neighbor
/// in U. U must sit inside one cell and take up at most half of it.
std::uint64_t neighbor_hit_count(const SampledGraph& graph,
                                 const std::vector<std::uint32_t>& u_set,
                                 std::size_t target_cell, const Partition& partition);

/// Expected-neighbor lower bound n * mu_j * (1 - (1 - k_l * p)^u_size).
double s_ij(double n, double mu_j, double k_l, double p, std::uint64_t u_size);

}  // namespace irg
