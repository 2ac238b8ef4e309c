#pragma once

#include <cstdint>
#include <string>

#include "deltagraph/bench/log.hpp"
#include "deltagraph/graph.hpp"

namespace deltagraph::bench {

enum class Kernel { PageRank, Sssp };
enum class ReportFormat { Human, Json };

struct BenchReport {
    std::string workload;
    std::uint32_t threads = 0;
    std::uint64_t committed_txns = 0;
    double throughput_txn_per_sec = 0.0;
    double analytics_latency_us = 0.0;  // mean per kernel run
    std::uint64_t analytics_runs = 0;
    std::uint64_t abort_count = 0;
    std::uint64_t consolidation_count = 0;
    std::uint64_t peak_memory_bytes = 0;
    std::uint64_t final_directed_edges = 0;
    bool verified = false;
};

struct MixedConfig {
    std::uint32_t threads = 4;
    Kernel kernel = Kernel::PageRank;
    bool hotspot = false;           // aim the kernel at the hub vertex
    double preload_fraction = 0.8;  // prefix of the log applied before timing
};

// One transaction per log record: ensure both endpoints exist, check both
// directed edges, insert (or delete) both. Conflict-aborted transactions are
// retried with fresh snapshots until they commit; each record counts once.
// The final state is verified against a sequential checked replay.
BenchReport run_construction(Graph& graph, const UpdateLog& log, std::uint32_t threads);

// Preloads a prefix of the log, then streams the rest through update workers
// while one analytics driver repeatedly runs the kernel on fresh snapshots.
BenchReport run_mixed(Graph& graph, const UpdateLog& log, const MixedConfig& config);

std::string emit_report(const BenchReport& report, ReportFormat format);

// Applies env var overrides (DELTAGRAPH_BLOCK_CAPACITY,
// DELTAGRAPH_TARGET_CHAIN_LEN, DELTAGRAPH_RECLAIM_PERIOD) over a base config.
EngineConfig config_from_env(EngineConfig base);

std::string weight_property(double weight);

} // namespace deltagraph::bench
