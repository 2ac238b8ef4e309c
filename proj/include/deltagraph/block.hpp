#pragma once

#include <atomic>
#include <cassert>
#include <cstring>
#include <string_view>
#include <variant>

#include "deltagraph/types.hpp"

namespace deltagraph {

// ---------------------------------------------------------------------------
// combined offset: one 64-bit word packing both region cursors so a single
// fetch_add allocates a delta slot and its external property space together.
// upper 32 bits = bytes allocated in the delta region (grows from the block
// end downward), lower 32 bits = bytes allocated in the data region (grows
// from byte 0 upward).
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t pack_offsets(std::uint32_t delta_bytes, std::uint32_t data_bytes) noexcept {
    return (static_cast<std::uint64_t>(delta_bytes) << 32) | data_bytes;
}

inline constexpr std::uint32_t delta_bytes_of(std::uint64_t combined) noexcept {
    return static_cast<std::uint32_t>(combined >> 32);
}

inline constexpr std::uint32_t data_bytes_of(std::uint64_t combined) noexcept {
    return static_cast<std::uint32_t>(combined & 0xFFFFFFFFu);
}

// ---------------------------------------------------------------------------
// EdgeDelta: one versioned edge mutation, exactly one cache line.
// creation_ts == 0 means the slot is allocated but not yet published.
// previous_offset links deltas of the same delta-chain (0 = chain end);
// previous_version_offset links versions of the same edge (0 = none).
// ---------------------------------------------------------------------------

struct alignas(64) EdgeDelta {
    std::atomic<timestamp_t> creation_ts;
    std::atomic<timestamp_t> invalidation_ts;
    vertex_t dst;
    delta_offset_t previous_offset;
    delta_offset_t previous_version_offset;
    std::uint32_t data_size;
    std::uint32_t data_offset;
    DeltaKind kind;
    char inline_data[kInlineDataCap];

    bool published() const noexcept { return creation_ts.load(std::memory_order_acquire) != 0; }
    bool aborted() const noexcept { return creation_ts.load(std::memory_order_acquire) == kAbortedSentinel; }
    bool inline_property() const noexcept { return data_size <= kInlineDataCap; }
};

static_assert(sizeof(EdgeDelta) == kDeltaRecordSize);

// ---------------------------------------------------------------------------
// DeltaChainsIndex: per-block dense array of chain heads doubling as
// chain-level no-wait locks. Entry layout:
//   bits 63..33  lock owner (low 31 bits of the owning transaction ID)
//   bit  32      lock flag
//   bits 31..0   head offset (0 = empty chain)
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kChainLockFlag = std::uint64_t{1} << 32;

inline constexpr std::uint32_t chain_head_of(std::uint64_t entry) noexcept {
    return static_cast<std::uint32_t>(entry & 0xFFFFFFFFu);
}

inline constexpr bool chain_locked(std::uint64_t entry) noexcept {
    return (entry & kChainLockFlag) != 0;
}

inline constexpr std::uint32_t chain_owner_of(std::uint64_t entry) noexcept {
    return static_cast<std::uint32_t>(entry >> 33);
}

inline constexpr std::uint32_t owner_tag(timestamp_t txn_id) noexcept {
    return static_cast<std::uint32_t>(txn_id & 0x7FFFFFFFu);
}

inline constexpr std::uint64_t make_locked_entry(timestamp_t txn_id, std::uint32_t head) noexcept {
    return (static_cast<std::uint64_t>(owner_tag(txn_id)) << 33) | kChainLockFlag | head;
}

enum class ChainLockResult { Acquired, Busy };

class DeltaChainsIndex {
public:
    DeltaChainsIndex(std::uint32_t count, std::atomic<std::uint64_t>* entries) noexcept
        : count_(count), entries_(entries) {
        assert(reinterpret_cast<std::uintptr_t>(entries) % alignof(std::atomic<std::uint64_t>) == 0);
    }

    std::uint32_t count() const noexcept { return count_; }

    std::atomic<std::uint64_t>& entry(chain_id_t chain) noexcept {
        assert(chain < count_);
        return entries_[chain];
    }

    std::uint32_t head(chain_id_t chain) noexcept {
        return chain_head_of(entry(chain).load(std::memory_order_acquire));
    }

    // Single compare-and-swap attempt, no waiting. Re-acquisition by the
    // owner succeeds idempotently.
    ChainLockResult try_lock(chain_id_t chain, timestamp_t txn_id) noexcept {
        auto& e = entry(chain);
        std::uint64_t cur = e.load(std::memory_order_acquire);
        if (chain_locked(cur)) {
            return chain_owner_of(cur) == owner_tag(txn_id) ? ChainLockResult::Acquired
                                                            : ChainLockResult::Busy;
        }
        std::uint64_t locked = make_locked_entry(txn_id, chain_head_of(cur));
        return e.compare_exchange_strong(cur, locked, std::memory_order_acq_rel)
                   ? ChainLockResult::Acquired
                   : ChainLockResult::Busy;
    }

    // Move the head while keeping the lock; only the owner may call this.
    void publish_head_locked(chain_id_t chain, timestamp_t txn_id, std::uint32_t new_head) noexcept {
        auto& e = entry(chain);
        assert(chain_locked(e.load(std::memory_order_relaxed)));
        assert(chain_owner_of(e.load(std::memory_order_relaxed)) == owner_tag(txn_id));
        (void)txn_id;
        e.store(make_locked_entry(txn_id, new_head), std::memory_order_release);
    }

    // Commit path: install new_head and clear the lock in one store.
    void unlock(chain_id_t chain, timestamp_t txn_id, std::uint32_t new_head) noexcept {
        auto& e = entry(chain);
        assert(chain_owner_of(e.load(std::memory_order_relaxed)) == owner_tag(txn_id));
        (void)txn_id;
        e.store(static_cast<std::uint64_t>(new_head), std::memory_order_release);
    }

    // Abort path (and commit after the head was already published):
    // clear the lock bits, keep whatever head is installed.
    void unlock_keep_head(chain_id_t chain, timestamp_t txn_id) noexcept {
        auto& e = entry(chain);
        std::uint64_t cur = e.load(std::memory_order_acquire);
        assert(chain_locked(cur) && chain_owner_of(cur) == owner_tag(txn_id));
        (void)txn_id;
        e.store(static_cast<std::uint64_t>(chain_head_of(cur)), std::memory_order_release);
    }

    // Consolidation builds the index before the block is reachable.
    void init_entry(chain_id_t chain, std::uint64_t raw) noexcept {
        entries_[chain].store(raw, std::memory_order_relaxed);
    }

private:
    std::uint32_t count_;
    std::atomic<std::uint64_t>* entries_;
};

// ---------------------------------------------------------------------------
// EdgeDeltaBlock: per-vertex arena holding the vertex's adjacency list.
// Memory layout of one allocation:
//   [ EdgeDeltaBlock header | chain index entries | pad to 64 | storage ]
// The delta region grows backward from storage end (first delta at offset
// 64), the data region forward from storage byte 0. A block is overflowed
// once delta bytes + data bytes would exceed capacity.
// ---------------------------------------------------------------------------

enum class BlockState : std::uint32_t { Normal = 0, Consolidating = 1 };

struct AllocatedSlots {
    delta_offset_t delta_offset;
    std::uint32_t data_offset;
};

struct Overflow {};

using AllocationResult = std::variant<AllocatedSlots, Overflow>;

class alignas(64) EdgeDeltaBlock {
public:
    vertex_t owner() const noexcept { return owner_; }
    std::uint32_t capacity() const noexcept { return capacity_; }
    std::uint32_t delta_chain_count() const noexcept { return chains_.count(); }
    timestamp_t creation_epoch() const noexcept { return creation_epoch_; }
    DeltaChainsIndex& chains() noexcept { return chains_; }

    // state protection -------------------------------------------------------

    BlockState state() const noexcept {
        return state_.load(std::memory_order_acquire);
    }

    bool try_enter_consolidation() noexcept {
        auto expected = BlockState::Normal;
        return state_.compare_exchange_strong(expected, BlockState::Consolidating,
                                              std::memory_order_acq_rel);
    }

    // Mutators (delta writers, commit stampers, abort rollback) hold the
    // writer count across their critical section; consolidation drains it
    // before reading the block's final state.
    bool enter_mutation() noexcept {
        writer_count_.fetch_add(1, std::memory_order_acq_rel);
        if (state_.load(std::memory_order_acquire) != BlockState::Normal) {
            writer_count_.fetch_sub(1, std::memory_order_acq_rel);
            return false;
        }
        return true;
    }

    void exit_mutation() noexcept {
        writer_count_.fetch_sub(1, std::memory_order_acq_rel);
    }

    std::uint32_t writer_count() const noexcept {
        return writer_count_.load(std::memory_order_acquire);
    }

    // allocation -------------------------------------------------------------

    // One fetch_add allocates the 64-byte delta slot plus external property
    // space. external_size must already be 0 for inline properties.
    AllocationResult allocate_delta(std::uint32_t external_size) noexcept {
        std::uint64_t prior =
            combined_offset_.fetch_add(pack_offsets(kDeltaRecordSize, external_size),
                                       std::memory_order_acq_rel);
        std::uint32_t prior_delta = delta_bytes_of(prior);
        std::uint32_t prior_data = data_bytes_of(prior);
        std::uint64_t used = std::uint64_t{prior_delta} + kDeltaRecordSize +
                             std::uint64_t{prior_data} + external_size;
        if (used > capacity_) {
            seal_overflow(prior);
            return Overflow{};
        }
        return AllocatedSlots{prior_delta + kDeltaRecordSize, prior_data};
    }

    std::uint64_t combined_offset() const noexcept {
        return combined_offset_.load(std::memory_order_acquire);
    }

    // Largest delta-region extent containing only genuinely allocated slots.
    // Once the combined offset passed capacity, failed allocations have
    // inflated it, so the extent recorded by the first failing allocator is
    // authoritative.
    std::uint32_t delta_extent() noexcept {
        std::uint64_t snap = combined_offset_.load(std::memory_order_acquire);
        if (std::uint64_t{delta_bytes_of(snap)} + data_bytes_of(snap) <= capacity_) {
            return delta_bytes_of(snap);
        }
        std::uint64_t sealed = sealed_offsets_.load(std::memory_order_acquire);
        while (sealed == 0) {
            // the failing allocator seals within a few instructions
            sealed = sealed_offsets_.load(std::memory_order_acquire);
        }
        return delta_bytes_of(sealed);
    }

    // record access ----------------------------------------------------------

    EdgeDelta& delta_at(delta_offset_t offset) noexcept {
        assert(offset >= kDeltaRecordSize && offset <= capacity_);
        return *reinterpret_cast<EdgeDelta*>(storage() + capacity_ - offset);
    }

    char* data_at(std::uint32_t data_offset) noexcept {
        return storage() + data_offset;
    }

    std::string_view property_of(const EdgeDelta& d) noexcept {
        if (d.data_size == 0) return {};
        if (d.inline_property()) return {d.inline_data, d.data_size};
        return {storage() + d.data_offset, d.data_size};
    }

    // Stores property bytes then publishes the record with a release store
    // on creation_ts, so readers that see the record see its full contents.
    void write_delta(const AllocatedSlots& slots, DeltaKind kind, vertex_t dst,
                     timestamp_t txn_id, delta_offset_t previous_offset,
                     delta_offset_t previous_version_offset, std::string_view property) noexcept {
        EdgeDelta& d = delta_at(slots.delta_offset);
        d.dst = dst;
        d.kind = kind;
        d.previous_offset = previous_offset;
        d.previous_version_offset = previous_version_offset;
        d.data_size = static_cast<std::uint32_t>(property.size());
        d.invalidation_ts.store(0, std::memory_order_relaxed);
        if (property.size() <= kInlineDataCap) {
            if (!property.empty()) std::memcpy(d.inline_data, property.data(), property.size());
        } else {
            d.data_offset = slots.data_offset;
            std::memcpy(data_at(slots.data_offset), property.data(), property.size());
        }
        d.creation_ts.store(txn_id, std::memory_order_release);
    }

    // construction ------------------------------------------------------------

    static std::size_t allocation_size(std::uint32_t capacity, std::uint32_t chain_count) noexcept {
        return header_bytes(chain_count) + capacity;
    }

    static EdgeDeltaBlock* init(void* zeroed_memory, vertex_t owner, std::uint32_t capacity,
                                std::uint32_t chain_count, timestamp_t creation_epoch) noexcept {
        auto* b = static_cast<EdgeDeltaBlock*>(zeroed_memory);
        b->owner_ = owner;
        b->capacity_ = capacity;
        b->creation_epoch_ = creation_epoch;
        b->storage_offset_ = static_cast<std::uint32_t>(header_bytes(chain_count));
        b->combined_offset_.store(0, std::memory_order_relaxed);
        b->sealed_offsets_.store(0, std::memory_order_relaxed);
        b->state_.store(BlockState::Normal, std::memory_order_relaxed);
        b->writer_count_.store(0, std::memory_order_relaxed);
        // chain entries start cache-line aligned right after the header
        auto* entries = reinterpret_cast<std::atomic<std::uint64_t>*>(
            reinterpret_cast<char*>(b) + sizeof(EdgeDeltaBlock));
        new (&b->chains_) DeltaChainsIndex(chain_count, entries);
        return b;
    }

    std::size_t allocation_size() const noexcept {
        return allocation_size(capacity_, chains_.count());
    }

private:
    static std::size_t header_bytes(std::uint32_t chain_count) noexcept {
        std::size_t raw = sizeof(EdgeDeltaBlock) + chain_count * sizeof(std::atomic<std::uint64_t>);
        return (raw + 63) & ~std::size_t{63};
    }

    char* storage() noexcept { return reinterpret_cast<char*>(this) + storage_offset_; }

    void seal_overflow(std::uint64_t my_prior) noexcept {
        // keep the smallest prior: the first failed allocation bounds the
        // genuine extents of both regions
        std::uint64_t cur = sealed_offsets_.load(std::memory_order_acquire);
        while (cur == 0 || delta_bytes_of(my_prior) < delta_bytes_of(cur)) {
            if (sealed_offsets_.compare_exchange_weak(cur, my_prior, std::memory_order_acq_rel)) break;
        }
    }

    vertex_t owner_;
    std::uint32_t capacity_;
    std::uint32_t storage_offset_;
    timestamp_t creation_epoch_;
    std::atomic<std::uint64_t> combined_offset_;
    std::atomic<std::uint64_t> sealed_offsets_;
    std::atomic<BlockState> state_;
    std::atomic<std::uint32_t> writer_count_;
    DeltaChainsIndex chains_;  // entries live after the header, cache-line aligned
};

static_assert(sizeof(EdgeDeltaBlock) % 64 == 0);

} // namespace deltagraph
