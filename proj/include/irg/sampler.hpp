#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "irg/kernel.hpp"
#include "irg/rng.hpp"

namespace irg {

struct SampleParams {
  std::uint64_t n = 1;
  double p = 0;
  std::uint64_t seed = 0;
  std::optional<double> omega;  // slack value for diagnostics; default loglog n
  unsigned threads = 1;
};

double resolved_omega(const SampleParams& params);
double default_omega(std::uint64_t n);

/// Per-vertex types: block indices on finite spaces, positions on intervals.
using TypeAssignment =
    std::variant<std::vector<std::uint32_t>, std::vector<double>>;

double type_value(const TypeAssignment& types, std::uint32_t v);
std::uint64_t type_digest(const TypeAssignment& types);

struct Provenance {
  std::string kernel_id;
  std::uint64_t n = 0;
  double p = 0;
  std::uint64_t seed = 0;
};

/// Undirected simple graph in compressed sparse form, neighbors sorted per
/// row. Immutable once built; safe to share across threads.
struct SampledGraph {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> offsets;    // n + 1
  std::vector<std::uint32_t> neighbors;  // 2 * edge_count
  std::uint64_t edge_count = 0;
  TypeAssignment types;
  Provenance provenance;

  std::span<const std::uint32_t> row(std::uint32_t v) const {
    return {neighbors.data() + offsets[v], neighbors.data() + offsets[v + 1]};
  }
  std::uint64_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
  bool has_edge(std::uint32_t u, std::uint32_t v) const;

  static SampledGraph from_edges(std::uint32_t n,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                                 TypeAssignment types, Provenance provenance);
};

/// Independent draws from the space's measure.
TypeAssignment sample_types(const TypeSpace& space, std::uint64_t n, rng::Engine& eng);

/// Graph where each unordered pair {i, j} is an edge independently with
/// probability K(X_i, X_j) * p. Step-structured kernels use geometric
/// skipping over per-block-pair enumerations (O(n + |E|) expected); other
/// kernels use bucket-grid rejection from per-bucket upper bounds. Output is
/// bit-identical for a given (kernel, params) at any thread count.
SampledGraph sample_graph(const Kernel& kernel, const SampleParams& params);

/// The kernel graph coupled under shared pair uniforms with the matching
/// dense-density graph (kernel identically 1). The first graph is a subgraph
/// of the second by construction.
std::pair<SampledGraph, SampledGraph> coupled_pair(const Kernel& kernel,
                                                   const SampleParams& params);

// Edge-list files: one "u v" line per edge, 0-indexed, u < v, plus a JSON
// sidecar at <path>.meta.json carrying the provenance and a type digest.
void write_edge_list(const SampledGraph& graph, const std::string& path);
SampledGraph read_edge_list(const std::string& path,
                            std::optional<std::uint32_t> n = std::nullopt);

}  // namespace irg
