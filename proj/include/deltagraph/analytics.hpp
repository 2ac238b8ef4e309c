#pragma once

#include <cstdint>
#include <vector>

#include "deltagraph/graph.hpp"
#include "deltagraph/types.hpp"

namespace deltagraph {

// Power iteration over the snapshot's adjacency (undirected edges count in
// both directions), dangling mass redistributed uniformly. Deterministic per
// snapshot: per-vertex pull sums run in scan order and the dangling
// reduction is sequential, so results are bitwise stable across runs and
// thread counts. Index 0 of the result is unused; entries sum to 1.
std::vector<double> pagerank(const ReadOnlyTransaction& snapshot, std::uint32_t iterations,
                             double damping, std::uint32_t threads = 0);

// Dijkstra (binary heap) over the snapshot. With use_weights set, an edge's
// weight is its property decoded as a little-endian double when at least 8
// bytes long, else 1.0; negative weights throw NegativeWeightError.
// Unreachable vertices hold infinity.
std::vector<double> sssp(const ReadOnlyTransaction& snapshot, vertex_t source, bool use_weights);

} // namespace deltagraph
