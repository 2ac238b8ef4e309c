#pragma once

#include <atomic>
#include <cassert>
#include <limits>
#include <memory>
#include <thread>
#include <vector>

#include "deltagraph/block.hpp"
#include "deltagraph/block_allocator.hpp"
#include "deltagraph/types.hpp"

namespace deltagraph {

// Tracks the read timestamps of live transactions (read-write and
// read-only). A transaction stays registered until its commit stamping or
// abort rollback completes, so min_rts() also covers committing-but-
// unstamped transactions (their rts never exceeds their wts).
class ActiveRegistry {
public:
    static constexpr std::size_t kSlots = 4096;
    static constexpr timestamp_t kNoMin = std::numeric_limits<timestamp_t>::max();

    using Ticket = std::uint32_t;
    static constexpr Ticket kInvalidTicket = std::numeric_limits<Ticket>::max();

    ActiveRegistry() : slots_(new std::atomic<timestamp_t>[kSlots]) {
        for (std::size_t i = 0; i < kSlots; ++i) slots_[i].store(0, std::memory_order_relaxed);
    }

    Ticket register_rts(timestamp_t rts) {
        assert(is_epoch(rts));
        std::size_t start = std::hash<std::thread::id>{}(std::this_thread::get_id());
        for (std::size_t probe = 0;; ++probe) {
            std::size_t i = (start + probe) & (kSlots - 1);
            timestamp_t expected = 0;
            if (slots_[i].compare_exchange_strong(expected, rts, std::memory_order_seq_cst)) {
                return static_cast<Ticket>(i);
            }
        }
    }

    void update(Ticket t, timestamp_t rts) {
        assert(t < kSlots);
        slots_[t].store(rts, std::memory_order_seq_cst);
    }

    void deregister(Ticket t) {
        assert(t < kSlots);
        slots_[t].store(0, std::memory_order_seq_cst);
    }

    // kNoMin when the registry is empty
    timestamp_t min_rts() const {
        timestamp_t min = kNoMin;
        for (std::size_t i = 0; i < kSlots; ++i) {
            timestamp_t v = slots_[i].load(std::memory_order_seq_cst);
            if (v != 0 && v < min) min = v;
        }
        return min;
    }

private:
    std::unique_ptr<std::atomic<timestamp_t>[]> slots_;
};

struct RetiredBlock {
    EdgeDeltaBlock* block;
    timestamp_t retire_epoch;  // global write epoch at retirement
    // transactions whose IDs the block still carries; each holds a stamp
    // guard on its table slot until the block is freed
    std::vector<timestamp_t> pinned_txns;
    RetiredBlock* next;
};

// Multi-producer enqueue, exclusive drain. Blocks are freed once no live or
// future transaction can reach them: retire_epoch < min active rts.
class RetiredQueue {
public:
    ~RetiredQueue() {
        RetiredBlock* n = head_.load(std::memory_order_relaxed);
        while (n != nullptr) {
            RetiredBlock* next = n->next;
            delete n;
            n = next;
        }
    }

    void retire(EdgeDeltaBlock* block, timestamp_t retire_epoch, std::vector<timestamp_t> pinned) {
        auto* node = new RetiredBlock{block, retire_epoch, std::move(pinned), nullptr};
        RetiredBlock* head = head_.load(std::memory_order_acquire);
        do {
            node->next = head;
        } while (!head_.compare_exchange_weak(head, node, std::memory_order_acq_rel));
        size_.fetch_add(1, std::memory_order_relaxed);
    }

    // Frees every retired block no longer reachable by any snapshot and
    // releases the table-slot pins of the IDs it carried. Returns the number
    // freed; 0 when another worker holds the drain or nothing is eligible.
    template <typename TableT>
    std::size_t reclaim(const ActiveRegistry& registry, BlockAllocator& allocator, TableT& table,
                        bool ignore_horizon = false) {
        bool expected = false;
        if (!draining_.compare_exchange_strong(expected, true, std::memory_order_acq_rel)) return 0;
        RetiredBlock* list = head_.exchange(nullptr, std::memory_order_acq_rel);
        timestamp_t horizon = ignore_horizon ? ActiveRegistry::kNoMin : registry.min_rts();
        std::size_t freed = 0;
        RetiredBlock* keep = nullptr;
        while (list != nullptr) {
            RetiredBlock* next = list->next;
            if (list->retire_epoch < horizon) {
                allocator.release(list->block);
                for (timestamp_t id : list->pinned_txns) table.release_stamp_guard(id);
                delete list;
                ++freed;
            } else {
                list->next = keep;
                keep = list;
            }
            list = next;
        }
        // push survivors back
        while (keep != nullptr) {
            RetiredBlock* next = keep->next;
            RetiredBlock* head = head_.load(std::memory_order_acquire);
            do {
                keep->next = head;
            } while (!head_.compare_exchange_weak(head, keep, std::memory_order_acq_rel));
            keep = next;
        }
        size_.fetch_sub(freed, std::memory_order_relaxed);
        draining_.store(false, std::memory_order_release);
        return freed;
    }

    std::size_t size() const noexcept { return size_.load(std::memory_order_relaxed); }

private:
    std::atomic<RetiredBlock*> head_{nullptr};
    std::atomic<bool> draining_{false};
    std::atomic<std::size_t> size_{0};
};

} // namespace deltagraph
