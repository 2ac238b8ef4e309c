#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "deltagraph/types.hpp"

namespace deltagraph::bench {

enum class UpdateOp { Insert, Delete };

struct UpdateRecord {
    UpdateOp op;
    vertex_t src;
    vertex_t dst;
    double weight;
};

struct UpdateLog {
    std::vector<UpdateRecord> records;
    vertex_t max_vertex = 0;
    // original file id -> dense engine id (identity for generated logs)
    std::unordered_map<std::uint64_t, vertex_t> remap;
};

enum class LoadMode { Shuffled, Ordered };

struct GeneratorConfig {
    vertex_t vertices = 10000;
    std::uint64_t edges = 100000;
    double zipf_alpha = 1.2;
    double delete_ratio = 0.1;
    std::uint64_t seed = 42;
};

// Text format, whitespace separated, '#' starts a comment line:
//   src dst [weight]      insert (undirected input edge)
//   D src dst             delete
// Arbitrary non-negative vertex ids are remapped densely from 1 in first-
// appearance order. Shuffled mode applies a seeded uniform permutation;
// ordered mode keeps file order (real logs carry temporal order, generated
// ones are grouped by source neighborhood).
UpdateLog load_edge_list(const std::string& path, LoadMode mode, std::uint64_t seed);

// Power-law update log: endpoints sampled from a Zipf distribution over the
// id space (vertex 1 is the heaviest hub), a delete_ratio fraction of
// inserted edges deleted later in the log, records grouped by source
// neighborhood so ordered replays hit hot vertices in bursts.
UpdateLog generate_log(const GeneratorConfig& config);

void write_log(const UpdateLog& log, const std::string& path);

void shuffle_log(UpdateLog& log, std::uint64_t seed);

} // namespace deltagraph::bench
