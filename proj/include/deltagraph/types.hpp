#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace deltagraph {

using vertex_t = std::uint64_t;
using timestamp_t = std::uint64_t;
using delta_offset_t = std::uint32_t;
using chain_id_t = std::uint32_t;

// Timestamp value space. Values below kTxnIdBase are resolved epoch
// timestamps; values at or above it are transaction IDs still awaiting
// resolution, except the all-ones sentinel which marks a dead delta.
// 0 means "absent" (no invalidation / not yet published).
inline constexpr timestamp_t kTxnIdBase = timestamp_t{1} << 63;
inline constexpr timestamp_t kAbortedSentinel = ~timestamp_t{0};

inline constexpr bool is_txn_id(timestamp_t ts) noexcept {
    return ts >= kTxnIdBase && ts != kAbortedSentinel;
}

inline constexpr bool is_epoch(timestamp_t ts) noexcept {
    return ts > 0 && ts < kTxnIdBase;
}

enum class DeltaKind : std::uint32_t {
    Insert = 1,
    Delete = 2,
    Update = 3,
};

// Every edge-delta record occupies one cache line.
inline constexpr std::uint32_t kDeltaRecordSize = 64;

// Properties at most this long live inside the delta record itself;
// longer ones go to the block's data region.
inline constexpr std::uint32_t kInlineDataCap = 16;

inline chain_id_t delta_chain_for(vertex_t dst, std::uint32_t chain_count) noexcept {
    // chain_count is a power of two, so the mod is a mask
    return static_cast<chain_id_t>(dst & (chain_count - 1));
}

struct StorageExhaustedError : std::runtime_error {
    explicit StorageExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeWeightError : std::runtime_error {
    explicit NegativeWeightError(const std::string& what) : std::runtime_error(what) {}
};

struct EngineConfig {
    // storage
    std::uint32_t initial_block_capacity = 4096;   // bytes, power of two
    std::uint32_t initial_delta_chain_count = 4;   // power of two
    std::uint32_t target_chain_length = 8;         // deltas per chain after consolidation
    std::uint32_t min_block_capacity = 512;        // floor for consolidated blocks
    // transactions
    std::uint32_t txn_table_capacity = 1u << 16;   // power of two
    timestamp_t initial_read_epoch = 1;
    // maintenance
    std::uint32_t reclaim_period = 256;            // transactions per worker between reclaim passes
    bool poison_freed_blocks = false;              // quarantine reclaimed blocks (PROT_NONE)
    // commit manager
    bool run_commit_thread = true;                 // false: tests drive commit_group_step() manually
    // analytics
    std::uint32_t analytics_threads = 0;           // 0 = hardware_concurrency
};

} // namespace deltagraph
