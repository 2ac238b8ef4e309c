#pragma once

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <vector>

#include "deltagraph/block.hpp"
#include "deltagraph/types.hpp"

namespace deltagraph {

// Allocates edge-deltas blocks from zeroed memory (readers rely on
// creation_ts == 0 marking unpublished slots). In poison mode blocks come
// from mmap and release() remaps them PROT_NONE instead of freeing, so any
// touch of reclaimed storage faults immediately.
class BlockAllocator {
public:
    explicit BlockAllocator(bool poison) : poison_(poison) {}

    BlockAllocator(const BlockAllocator&) = delete;
    BlockAllocator& operator=(const BlockAllocator&) = delete;

    ~BlockAllocator();

    EdgeDeltaBlock* allocate(vertex_t owner, std::uint32_t capacity, std::uint32_t chain_count,
                             timestamp_t creation_epoch);

    void release(EdgeDeltaBlock* block);

    std::uint64_t live_blocks() const noexcept { return live_.load(std::memory_order_relaxed); }
    std::uint64_t quarantined_blocks() const noexcept { return quarantined_.load(std::memory_order_relaxed); }

private:
    bool poison_;
    std::atomic<std::uint64_t> live_{0};
    std::atomic<std::uint64_t> quarantined_{0};
    std::mutex quarantine_mutex_;
    std::vector<std::pair<void*, std::size_t>> quarantine_;
};

} // namespace deltagraph
