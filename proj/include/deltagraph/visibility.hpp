#pragma once

#include <atomic>

#include "deltagraph/transaction_table.hpp"
#include "deltagraph/types.hpp"

namespace deltagraph {

struct ResolvedView {
    enum class Kind { Absent, Epoch, InProgress, Aborted };
    Kind kind;
    timestamp_t epoch;   // valid when kind == Epoch
    timestamp_t txn;     // valid when kind == InProgress

    static ResolvedView absent() { return {Kind::Absent, 0, 0}; }
    static ResolvedView at(timestamp_t e) { return {Kind::Epoch, e, 0}; }
    static ResolvedView in_progress(timestamp_t t) { return {Kind::InProgress, 0, t}; }
    static ResolvedView aborted() { return {Kind::Aborted, 0, 0}; }
};

// Resolves a delta timestamp field, cooperatively stamping committed
// transaction IDs with their commit timestamp (hybrid commit). A field
// holding the ID of an aborted transaction is replaced with
// `aborted_replacement` (the dead-delta sentinel for creation fields, 0 for
// invalidation fields). CAS failures are benign: someone else stamped first.
inline ResolvedView resolve_field(std::atomic<timestamp_t>& field, const TransactionTable& table,
                                  timestamp_t aborted_replacement) {
    for (;;) {
        timestamp_t ts = field.load(std::memory_order_acquire);
        if (ts == 0) return ResolvedView::absent();
        if (ts == kAbortedSentinel) return ResolvedView::aborted();
        if (is_epoch(ts)) return ResolvedView::at(ts);
        TxnStatus status = table.lookup(ts);
        if (!status.current) {
            // slot recycled: the field must have been stamped meanwhile
            continue;
        }
        switch (status.state) {
            case TxnState::InProgress:
                return ResolvedView::in_progress(ts);
            case TxnState::Committing:
            case TxnState::Committed:
                field.compare_exchange_strong(ts, status.wts, std::memory_order_acq_rel);
                return ResolvedView::at(status.wts);
            case TxnState::Aborted:
                field.compare_exchange_strong(ts, aborted_replacement, std::memory_order_acq_rel);
                return aborted_replacement == 0 ? ResolvedView::absent() : ResolvedView::aborted();
        }
    }
}

inline ResolvedView resolve_creation(std::atomic<timestamp_t>& field, const TransactionTable& table) {
    return resolve_field(field, table, kAbortedSentinel);
}

inline ResolvedView resolve_invalidation(std::atomic<timestamp_t>& field, const TransactionTable& table) {
    return resolve_field(field, table, 0);
}

// Snapshot-isolation visibility: a delta is visible when it was created at
// or before rts and invalidated strictly after rts (or not at all), with
// read-your-writes for the owning transaction. The boundary is exclusive: a
// version invalidated at exactly rts is already replaced in that snapshot.
inline bool visible(const ResolvedView& creation, const ResolvedView& invalidation, timestamp_t rts,
                    timestamp_t self_txn_id) {
    using K = ResolvedView::Kind;
    if (creation.kind == K::InProgress && creation.txn == self_txn_id) {
        // own pending write: visible unless the transaction itself replaced it
        return invalidation.kind == K::Absent || invalidation.kind == K::Aborted;
    }
    if (creation.kind != K::Epoch || creation.epoch > rts) return false;
    switch (invalidation.kind) {
        case K::Absent:
        case K::Aborted:
            return true;
        case K::InProgress:
            // the invalidator is this transaction itself: the version is replaced
            return invalidation.txn != self_txn_id;
        case K::Epoch:
            return invalidation.epoch > rts;
    }
    return false;
}

} // namespace deltagraph
