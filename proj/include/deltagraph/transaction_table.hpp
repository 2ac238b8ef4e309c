#pragma once

#include <atomic>
#include <cassert>
#include <memory>
#include <thread>

#include "deltagraph/types.hpp"

namespace deltagraph {

enum class TxnState : std::uint64_t {
    InProgress = 0,
    Committing = 1,
    Committed = 2,
    Aborted = 3,
};

struct TxnStatus {
    TxnState state;
    timestamp_t wts;   // valid for Committing / Committed
    bool current;      // false: the slot no longer belongs to the queried id
};

// Fixed-size O(1) status table. Slot index comes from the transaction
// sequence number; the full 64-bit id stored in `owner` is the generation
// tag (ids are never reused, so owner == id pins the slot to exactly one
// transaction). A slot is recycled only once its stamp guard reaches zero,
// i.e. no delta anywhere still carries the owning id.
class TransactionTable {
public:
    explicit TransactionTable(std::uint32_t capacity)
        : capacity_(capacity), mask_(capacity - 1), slots_(new Slot[capacity]) {
        assert((capacity & (capacity - 1)) == 0);
    }

    // Claims the slot for a fresh transaction id; returns 0 when the slot is
    // still guarded by an earlier transaction (the sequence number is burned
    // and the caller retries, typically after a reclamation pass frees the
    // retired blocks pinning old slots).
    timestamp_t try_register_transaction() {
        timestamp_t txn_id = kTxnIdBase | next_seq_.fetch_add(1, std::memory_order_relaxed);
        Slot& s = slot_of(txn_id);
        timestamp_t expected = 0;
        if (!s.owner.compare_exchange_strong(expected, txn_id, std::memory_order_acq_rel)) {
            return 0;
        }
        s.status.store(encode(TxnState::InProgress, 0), std::memory_order_relaxed);
        s.stamp_guard.store(1, std::memory_order_release);
        return txn_id;
    }

    TxnStatus lookup(timestamp_t txn_id) const {
        const Slot& s = slot_of(txn_id);
        // owner double-check brackets the status load so a recycled slot is
        // never misread as the old transaction's state
        if (s.owner.load(std::memory_order_acquire) != txn_id) return {TxnState::Committed, 0, false};
        std::uint64_t raw = s.status.load(std::memory_order_acquire);
        if (s.owner.load(std::memory_order_acquire) != txn_id) return {TxnState::Committed, 0, false};
        return {state_of(raw), wts_of(raw), true};
    }

    void set_committing(timestamp_t txn_id, timestamp_t wts) {
        Slot& s = slot_of(txn_id);
        assert(s.owner.load(std::memory_order_relaxed) == txn_id);
        s.status.store(encode(TxnState::Committing, wts), std::memory_order_release);
    }

    void set_committed(timestamp_t txn_id, timestamp_t wts) {
        Slot& s = slot_of(txn_id);
        assert(s.owner.load(std::memory_order_relaxed) == txn_id);
        s.status.store(encode(TxnState::Committed, wts), std::memory_order_release);
    }

    void set_aborted(timestamp_t txn_id) {
        Slot& s = slot_of(txn_id);
        assert(s.owner.load(std::memory_order_relaxed) == txn_id);
        s.status.store(encode(TxnState::Aborted, 0), std::memory_order_release);
    }

    // Consolidation pins the slot of every transaction whose id the retired
    // block still carries; the pin is released when the block is freed. The
    // owner's base guard is necessarily still held at pin time (its stamping
    // or rollback completes only after the consolidation installs).
    void pin_stamp_guard(timestamp_t txn_id) {
        Slot& s = slot_of(txn_id);
        assert(s.owner.load(std::memory_order_relaxed) == txn_id);
        assert(s.stamp_guard.load(std::memory_order_relaxed) > 0);
        s.stamp_guard.fetch_add(1, std::memory_order_acq_rel);
    }

    // Called once all of the transaction's delta fields are stamped (commit)
    // or rolled back (abort); at zero the slot becomes reusable.
    void release_stamp_guard(timestamp_t txn_id) {
        Slot& s = slot_of(txn_id);
        assert(s.owner.load(std::memory_order_relaxed) == txn_id);
        if (s.stamp_guard.fetch_sub(1, std::memory_order_acq_rel) == 1) {
            s.owner.store(0, std::memory_order_release);
        }
    }

    std::uint32_t stamp_guard(timestamp_t txn_id) const {
        const Slot& s = slot_of(txn_id);
        return s.stamp_guard.load(std::memory_order_acquire);
    }

    std::uint32_t capacity() const noexcept { return capacity_; }

private:
    struct alignas(64) Slot {
        std::atomic<timestamp_t> owner{0};
        std::atomic<std::uint64_t> status{0};
        std::atomic<std::uint32_t> stamp_guard{0};
    };

    static std::uint64_t encode(TxnState state, timestamp_t wts) noexcept {
        return (wts << 2) | static_cast<std::uint64_t>(state);
    }
    static TxnState state_of(std::uint64_t raw) noexcept { return static_cast<TxnState>(raw & 3); }
    static timestamp_t wts_of(std::uint64_t raw) noexcept { return raw >> 2; }

    Slot& slot_of(timestamp_t txn_id) { return slots_[(txn_id & ~kTxnIdBase) & mask_]; }
    const Slot& slot_of(timestamp_t txn_id) const { return slots_[(txn_id & ~kTxnIdBase) & mask_]; }

    std::uint32_t capacity_;
    std::uint64_t mask_;
    std::unique_ptr<Slot[]> slots_;
    std::atomic<std::uint64_t> next_seq_{1};
};

} // namespace deltagraph
