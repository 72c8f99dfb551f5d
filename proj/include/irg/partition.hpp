#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "irg/hops.hpp"
#include "irg/kernel.hpp"

namespace irg {

/// Ordered list of disjoint positive-measure cells covering the type space.
class Partition {
 public:
  static Partition of(TypeSpace space, std::vector<Cell> cells);
  /// One cell per block of a step-structured kernel.
  static Partition blocks_of(const Kernel& kernel);
  static Partition uniform_grid(const TypeSpace& space, std::size_t cell_count);
  static Partition from_breakpoints(const TypeSpace& space,
                                    std::vector<double> breakpoints);
  /// Finite spaces: one cell per listed group of type indices.
  static Partition from_groups(const TypeSpace& space,
                               std::vector<std::vector<std::uint32_t>> groups);

  const TypeSpace& space() const { return space_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<double>& measures() const { return measures_; }
  std::size_t size() const { return cells_.size(); }
  double min_measure() const;

  std::size_t cell_of(double point) const;

 private:
  Partition(TypeSpace space, std::vector<Cell> cells, std::vector<double> measures);
  void build_lookup();
  TypeSpace space_;
  std::vector<Cell> cells_;
  std::vector<double> measures_;
  std::vector<std::tuple<double, double, std::uint32_t>> lookup_;  // interval spaces
  std::vector<std::uint32_t> block_to_cell_;                       // finite spaces
};

/// True iff every cell of a is contained (up to measure zero) in a cell of b.
bool is_refinement(const Partition& a, const Partition& b);

/// All positive-measure pairwise intersections; refines both arguments.
Partition common_refinement(const Partition& a, const Partition& b);

enum class GraphFlavor { kLower, kUpper };

/// Finite graph on the cells of a partition. An edge is present wherever the
/// essential bound (lower or upper, by flavor) of the kernel over the cell
/// pair is positive. Self-loops are recorded; shortest-path distances and
/// the diameter ignore them.
struct PartitionGraph {
  GraphFlavor flavor = GraphFlavor::kLower;
  std::shared_ptr<const Partition> cells;
  std::vector<char> adjacency;     // m*m, includes the diagonal
  std::vector<double> edge_values; // m*m, bound value where adjacent
  double min_edge_value = 0;       // min over present edges, loops included
  double min_cell_measure = 0;
  bool exact = false;

  std::size_t size() const { return cells->size(); }
  bool adjacent(std::size_t i, std::size_t j) const {
    return adjacency[i * size() + j] != 0;
  }
  double value(std::size_t i, std::size_t j) const {
    return edge_values[i * size() + j];
  }
  std::size_t degree(std::size_t i) const;
};

PartitionGraph lower_graph(const Kernel& kernel, const Partition& partition);
PartitionGraph upper_graph(const Kernel& kernel, const Partition& partition);
/// Both flavors from one bounds scan.
std::pair<PartitionGraph, PartitionGraph> partition_graphs(const Kernel& kernel,
                                                           const Partition& partition);

/// Simple-graph diameter over the cells; infinite when disconnected.
HopCount graph_diameter(const PartitionGraph& g);

/// Whether a walk of length exactly L joins cells i and j. Walks may repeat
/// vertices and edges; self-loops count as steps and flip walk parity.
bool exact_length_walk_exists(const PartitionGraph& g, std::size_t i, std::size_t j,
                              std::uint64_t length);

struct DeltaBounds {
  HopCount delta_u;
  HopCount delta_l;
  bool exact = false;
  std::optional<Partition> witness_u;
  std::optional<Partition> witness_l;
  std::size_t resolution = 0;  // grid cells at stabilization (estimated path)
};

struct DeltaOptions {
  std::size_t grid_start = 8;
  int grid_rounds = 5;
};

/// Extremal partition-graph diameters. Exact for step-structured kernels
/// (the block partition attains both); estimated over a doubling schedule
/// of regular grid partitions otherwise. Reducible kernels report both
/// values infinite.
DeltaBounds delta_bounds(const Kernel& kernel, const DeltaOptions& options = {});

/// The two-sided bound delta_u <= delta_l <= delta_u + 2.
bool check_diff2(const DeltaBounds& bounds);

enum class WalkConditionVerdict { kHolds, kFails, kUnknown };

struct WalkConditionResult {
  WalkConditionVerdict verdict = WalkConditionVerdict::kUnknown;
  // When the verdict is kHolds: a partition (as block groups) and a cell
  // pair in its upper graph with no walk of the probed length.
  std::vector<std::vector<std::uint32_t>> witness_groups;
  int witness_i = -1;
  int witness_j = -1;
};

/// Searches the block partition and all coarsenings of the block set for a
/// cell pair with no walk of length exactly phi in the upper graph. Finding
/// one settles the length-phi obstruction (kHolds); if every coarsening has
/// such walks between all pairs the verdict is kFails. Non-step kernels
/// return kUnknown.
WalkConditionResult walk_condition(const Kernel& kernel, std::uint64_t phi);

/// Visits all set partitions of {0..m-1} as restricted-growth strings;
/// return false from the visitor to stop early.
void enumerate_set_partitions(std::size_t m,
                              const std::function<bool(const std::vector<std::uint32_t>&)>& visit);

}  // namespace irg
