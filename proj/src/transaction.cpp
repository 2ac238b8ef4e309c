#include <thread>
#include <unordered_set>

#include "deltagraph/graph.hpp"

namespace deltagraph {

namespace {

void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_ia32_pause();
#else
    std::this_thread::yield();
#endif
}

struct Latest {
    EdgeDelta* delta = nullptr;
    delta_offset_t offset = 0;
};

// Newest non-dead version record of (block.owner, dst), reached through the
// delta-chain and, when the head record for dst was aborted, through its
// previous-version links. Stops at the first chain record matching dst: chain
// order makes it the latest.
Latest latest_version_of(EdgeDeltaBlock& block, delta_offset_t head, vertex_t dst) {
    delta_offset_t off = head;
    while (off != 0) {
        EdgeDelta& d = block.delta_at(off);
        if (d.dst == dst) {
            EdgeDelta* cur = &d;
            delta_offset_t cur_off = off;
            while (cur != nullptr && cur->aborted()) {
                cur_off = cur->previous_version_offset;
                cur = cur_off != 0 ? &block.delta_at(cur_off) : nullptr;
            }
            return {cur, cur != nullptr ? cur_off : 0};
        }
        off = d.previous_offset;
    }
    return {};
}

std::optional<std::string> lookup_edge_from(Graph& g, EdgeDeltaBlock& block, delta_offset_t head,
                                            vertex_t dst, timestamp_t rts, timestamp_t self) {
    Latest latest = latest_version_of(block, head, dst);
    EdgeDelta* d = latest.delta;
    while (d != nullptr) {
        ResolvedView cr = resolve_creation(d->creation_ts, g.txn_table());
        ResolvedView inv = resolve_invalidation(d->invalidation_ts, g.txn_table());
        if (visible(cr, inv, rts, self)) {
            if (d->kind == DeltaKind::Delete) return std::nullopt;
            return std::string(block.property_of(*d));
        }
        delta_offset_t prev = d->previous_version_offset;
        d = prev != 0 ? &block.delta_at(prev) : nullptr;
        while (d != nullptr && d->aborted()) {
            prev = d->previous_version_offset;
            d = prev != 0 ? &block.delta_at(prev) : nullptr;
        }
    }
    return std::nullopt;
}

// Whole-block scan: one combined-offset snapshot bounds the walk, newest
// offsets first, each destination emitted at most once.
void scan_block(Graph& g, EdgeDeltaBlock& block, timestamp_t rts, timestamp_t self,
                const std::function<void(vertex_t, std::string_view)>& emit) {
    std::uint32_t extent = block.delta_extent();
    std::unordered_set<vertex_t> seen;
    for (delta_offset_t off = extent; off >= kDeltaRecordSize; off -= kDeltaRecordSize) {
        EdgeDelta& d = block.delta_at(off);
        timestamp_t craw = d.creation_ts.load(std::memory_order_acquire);
        if (craw == 0) {
            // allocated but not yet published; such a delta cannot belong to
            // this snapshot, so a short grace spin then skip is safe
            for (int i = 0; i < 16 && craw == 0; ++i) {
                cpu_relax();
                craw = d.creation_ts.load(std::memory_order_acquire);
            }
            if (craw == 0) continue;
        }
        if (craw == kAbortedSentinel) continue;
        ResolvedView cr = resolve_creation(d.creation_ts, g.txn_table());
        ResolvedView inv = resolve_invalidation(d.invalidation_ts, g.txn_table());
        if (!visible(cr, inv, rts, self)) continue;
        if (!seen.insert(d.dst).second) continue;
        if (d.kind != DeltaKind::Delete) emit(d.dst, block.property_of(d));
    }
}

std::optional<std::string> lookup_vertex(Graph& g, vertex_t v, timestamp_t rts, timestamp_t self) {
    VertexEntry* entry = g.index().entry_if_present(v);
    if (entry == nullptr) return std::nullopt;
    for (VertexDelta* d = entry->vertex_head.load(std::memory_order_acquire); d != nullptr;
         d = d->previous) {
        ResolvedView cr = resolve_creation(d->creation_ts, g.txn_table());
        if (cr.kind == ResolvedView::Kind::InProgress && cr.txn == self) {
            return std::string(d->property());
        }
        if (cr.kind == ResolvedView::Kind::Epoch && cr.epoch <= rts) {
            return std::string(d->property());
        }
    }
    return std::nullopt;
}

} // namespace

// ---------------------------------------------------------------------------
// Transaction
// ---------------------------------------------------------------------------

Transaction::~Transaction() {
    if (graph_ != nullptr && state_ == TxnLifecycle::Active) abort();
}

VertexTouch& Transaction::touch_for(vertex_t v, std::uint64_t block_version, EdgeDeltaBlock& block) {
    VertexTouch& t = touches_[v];
    if (t.block_version == block_version) return t;
    // Consolidation moved our deltas. A chain that still carried one of our
    // in-progress deltas is locked by us in the rebuilt index with our newest
    // delta at its head. While we are Committing, however, cooperative
    // stamping may already have resolved our deltas, in which case the
    // rebuild released the chain (and another writer may even own it now).
    // The owner tag decides exactly: two live transactions can never share a
    // tag, since equal low bits would collide on one table slot.
    t.locked_chains.clear();
    t.private_heads.clear();
    for (vertex_t dst : t.created_dsts) {
        chain_id_t chain = delta_chain_for(dst, block.delta_chain_count());
        if (t.locked_chains.count(chain) != 0) continue;
        std::uint64_t raw = block.chains().entry(chain).load(std::memory_order_acquire);
        if (chain_locked(raw) && chain_owner_of(raw) == owner_tag(txn_id_)) {
            t.locked_chains.insert(chain);
            t.private_heads[chain] = chain_head_of(raw);
        }
    }
    t.block_version = block_version;
    return t;
}

delta_offset_t Transaction::search_head(const VertexTouch& touch, chain_id_t chain,
                                        DeltaChainsIndex& chains) {
    auto it = touch.private_heads.find(chain);
    if (it != touch.private_heads.end()) return it->second;
    return chain_head_of(chains.entry(chain).load(std::memory_order_acquire));
}

template <typename R>
R Transaction::conflict_abort() {
    abort();
    return R::Conflict;
}

std::optional<std::string> Transaction::read_vertex(vertex_t v) {
    assert(state_ == TxnLifecycle::Active);
    return lookup_vertex(*graph_, v, rts_, txn_id_);
}

VertexWriteResult Transaction::write_vertex(vertex_t v, std::string_view property) {
    assert(state_ == TxnLifecycle::Active);
    Graph& g = *graph_;
    g.index().ensure(v);
    VertexEntry& entry = g.index().entry(v);
    VertexDelta* head = entry.vertex_head.load(std::memory_order_acquire);
    if (head != nullptr) {
        ResolvedView cr = resolve_creation(head->creation_ts, g.txn_table());
        if (cr.kind == ResolvedView::Kind::InProgress && cr.txn != txn_id_) {
            return conflict_abort<VertexWriteResult>();
        }
        if (cr.kind == ResolvedView::Kind::Epoch && cr.epoch > rts_) {
            return conflict_abort<VertexWriteResult>();
        }
    }
    VertexDelta* delta = VertexDelta::make(txn_id_, head, property);
    if (!entry.vertex_head.compare_exchange_strong(head, delta, std::memory_order_acq_rel)) {
        std::free(delta);
        return conflict_abort<VertexWriteResult>();
    }
    touches_[v].vertex_written = true;
    ++op_count_;
    return VertexWriteResult::Ok;
}

EdgeUpsertResult Transaction::insert_edge(vertex_t src, vertex_t dst, std::string_view property) {
    assert(state_ == TxnLifecycle::Active);
    Graph& g = *graph_;
    g.index().ensure(src);
    g.index().ensure(dst);
    VertexEntry& entry = g.index().entry(src);
    for (;;) {
        EdgeDeltaBlock* block = g.block_for_write(entry, src);
        if (!block->enter_mutation()) {
            g.wait_for_install(entry, block);
            continue;
        }
        std::uint64_t version = entry.block_version.load(std::memory_order_acquire);
        VertexTouch& touch = touch_for(src, version, *block);
        DeltaChainsIndex& chains = block->chains();
        chain_id_t chain = delta_chain_for(dst, block->delta_chain_count());
        if (touch.locked_chains.count(chain) == 0) {
            if (chains.try_lock(chain, txn_id_) != ChainLockResult::Acquired) {
                block->exit_mutation();
                return conflict_abort<EdgeUpsertResult>();
            }
            touch.locked_chains.insert(chain);
        }
        delta_offset_t head = search_head(touch, chain, chains);
        Latest latest = latest_version_of(*block, head, dst);
        bool prior_is_delete = false;
        if (latest.delta != nullptr) {
            ResolvedView cr = resolve_creation(latest.delta->creation_ts, g.txn_table());
            bool own = cr.kind == ResolvedView::Kind::InProgress && cr.txn == txn_id_;
            if ((cr.kind == ResolvedView::Kind::InProgress && !own) ||
                (cr.kind == ResolvedView::Kind::Epoch && cr.epoch > rts_)) {
                // first-updater wins: a version this snapshot cannot see
                // (or one still in flight) postdates us
                block->exit_mutation();
                return conflict_abort<EdgeUpsertResult>();
            }
            prior_is_delete = latest.delta->kind == DeltaKind::Delete;
            // stamp the prior version's invalidation with our id
            auto& inv = latest.delta->invalidation_ts;
            if (inv.load(std::memory_order_acquire) != txn_id_) {
                for (;;) {
                    timestamp_t expected = 0;
                    if (inv.compare_exchange_strong(expected, txn_id_, std::memory_order_acq_rel)) break;
                    if (expected == txn_id_) break;  // stamped before an overflow retry
                    // a dead invalidator's id is cooperatively cleared; a live
                    // one is a write-write conflict
                    ResolvedView iv = resolve_invalidation(inv, g.txn_table());
                    if (iv.kind == ResolvedView::Kind::Absent) continue;
                    block->exit_mutation();
                    return conflict_abort<EdgeUpsertResult>();
                }
            }
            touch.touched_dsts.insert(dst);
        }
        std::uint32_t external =
            property.size() > kInlineDataCap ? static_cast<std::uint32_t>(property.size()) : 0;
        AllocationResult alloc = block->allocate_delta(external);
        if (std::holds_alternative<Overflow>(alloc)) {
            block->exit_mutation();
            g.handle_overflow(entry, block);
            continue;
        }
        DeltaKind kind = (latest.delta == nullptr || prior_is_delete) ? DeltaKind::Insert
                                                                      : DeltaKind::Update;
        const auto& slots = std::get<AllocatedSlots>(alloc);
        block->write_delta(slots, kind, dst, txn_id_, head, latest.offset, property);
        touch.private_heads[chain] = slots.delta_offset;
        touch.created_dsts.insert(dst);
        touch.touched_dsts.insert(dst);
        block->exit_mutation();
        ++op_count_;
        return kind == DeltaKind::Insert ? EdgeUpsertResult::Inserted : EdgeUpsertResult::Updated;
    }
}

EdgeDeleteResult Transaction::delete_edge(vertex_t src, vertex_t dst) {
    assert(state_ == TxnLifecycle::Active);
    Graph& g = *graph_;
    g.index().ensure(src);
    VertexEntry& entry = g.index().entry(src);
    for (;;) {
        EdgeDeltaBlock* block = g.block_for_write(entry, src);
        if (!block->enter_mutation()) {
            g.wait_for_install(entry, block);
            continue;
        }
        std::uint64_t version = entry.block_version.load(std::memory_order_acquire);
        VertexTouch& touch = touch_for(src, version, *block);
        DeltaChainsIndex& chains = block->chains();
        chain_id_t chain = delta_chain_for(dst, block->delta_chain_count());
        bool fresh = touch.locked_chains.count(chain) == 0;
        if (fresh) {
            if (chains.try_lock(chain, txn_id_) != ChainLockResult::Acquired) {
                block->exit_mutation();
                return conflict_abort<EdgeDeleteResult>();
            }
            touch.locked_chains.insert(chain);
        }
        delta_offset_t head = search_head(touch, chain, chains);
        Latest latest = latest_version_of(*block, head, dst);
        if (latest.delta != nullptr) {
            ResolvedView cr = resolve_creation(latest.delta->creation_ts, g.txn_table());
            bool own = cr.kind == ResolvedView::Kind::InProgress && cr.txn == txn_id_;
            if ((cr.kind == ResolvedView::Kind::InProgress && !own) ||
                (cr.kind == ResolvedView::Kind::Epoch && cr.epoch > rts_)) {
                block->exit_mutation();
                return conflict_abort<EdgeDeleteResult>();
            }
        }
        if (latest.delta == nullptr || latest.delta->kind == DeltaKind::Delete) {
            // checked semantics: nothing to delete, transaction stays alive
            if (fresh) {
                chains.unlock_keep_head(chain, txn_id_);
                touch.locked_chains.erase(chain);
            }
            block->exit_mutation();
            return EdgeDeleteResult::NotFound;
        }
        auto& inv = latest.delta->invalidation_ts;
        if (inv.load(std::memory_order_acquire) != txn_id_) {
            for (;;) {
                timestamp_t expected = 0;
                if (inv.compare_exchange_strong(expected, txn_id_, std::memory_order_acq_rel)) break;
                if (expected == txn_id_) break;
                ResolvedView iv = resolve_invalidation(inv, g.txn_table());
                if (iv.kind == ResolvedView::Kind::Absent) continue;
                block->exit_mutation();
                return conflict_abort<EdgeDeleteResult>();
            }
        }
        touch.touched_dsts.insert(dst);
        AllocationResult alloc = block->allocate_delta(0);
        if (std::holds_alternative<Overflow>(alloc)) {
            block->exit_mutation();
            g.handle_overflow(entry, block);
            continue;
        }
        const auto& slots = std::get<AllocatedSlots>(alloc);
        block->write_delta(slots, DeltaKind::Delete, dst, txn_id_, head, latest.offset, {});
        touch.private_heads[chain] = slots.delta_offset;
        touch.created_dsts.insert(dst);
        block->exit_mutation();
        ++op_count_;
        return EdgeDeleteResult::Deleted;
    }
}

std::optional<std::string> Transaction::get_edge(vertex_t src, vertex_t dst) {
    assert(state_ == TxnLifecycle::Active);
    Graph& g = *graph_;
    auto touched = touches_.find(src);
    if (touched == touches_.end() || touched->second.created_dsts.empty()) {
        VertexEntry* entry = g.index().entry_if_present(src);
        if (entry == nullptr) return std::nullopt;
        EdgeDeltaBlock* block = entry->block.load(std::memory_order_seq_cst);
        if (block == nullptr) return std::nullopt;
        chain_id_t chain = delta_chain_for(dst, block->delta_chain_count());
        delta_offset_t head = block->chains().head(chain);
        return lookup_edge_from(g, *block, head, dst, rts_, txn_id_);
    }
    // we hold locks here: stabilize the block so private heads stay valid
    VertexEntry& entry = g.index().entry(src);
    for (;;) {
        EdgeDeltaBlock* block = entry.block.load(std::memory_order_seq_cst);
        if (!block->enter_mutation()) {
            g.wait_for_install(entry, block);
            continue;
        }
        std::uint64_t version = entry.block_version.load(std::memory_order_acquire);
        VertexTouch& touch = touch_for(src, version, *block);
        chain_id_t chain = delta_chain_for(dst, block->delta_chain_count());
        delta_offset_t head = search_head(touch, chain, block->chains());
        auto result = lookup_edge_from(g, *block, head, dst, rts_, txn_id_);
        block->exit_mutation();
        return result;
    }
}

void Transaction::scan_adjacency(vertex_t src,
                                 const std::function<void(vertex_t, std::string_view)>& emit) {
    assert(state_ == TxnLifecycle::Active);
    VertexEntry* entry = graph_->index().entry_if_present(src);
    if (entry == nullptr) return;
    EdgeDeltaBlock* block = entry->block.load(std::memory_order_seq_cst);
    if (block == nullptr) return;
    scan_block(*graph_, *block, rts_, txn_id_, emit);
}

std::vector<std::pair<vertex_t, std::string>> Transaction::scan_adjacency(vertex_t src) {
    std::vector<std::pair<vertex_t, std::string>> out;
    scan_adjacency(src, [&](vertex_t dst, std::string_view prop) { out.emplace_back(dst, std::string(prop)); });
    return out;
}

timestamp_t Transaction::commit() {
    assert(state_ == TxnLifecycle::Active);
    if (op_count_ == 0) {
        // nothing written: no group membership needed
        graph_->txn_table().set_committed(txn_id_, rts_);
        finish(TxnLifecycle::Committed);
        return rts_;
    }
    state_ = TxnLifecycle::CommitPending;
    publish_commit_heads();
    CommitRequest request;
    request.txn_id = txn_id_;
    timestamp_t wts = graph_->commit_manager().request_commit(request);
    stamp_writes(wts);
    graph_->txn_table().set_committed(txn_id_, wts);
    // the manager signals members before advancing the epochs; wait out the
    // advance so this session's next snapshot sees this commit
    graph_->commit_manager().wait_until_visible(wts);
    finish(TxnLifecycle::Committed);
    return wts;
}

void Transaction::abort() {
    assert(state_ == TxnLifecycle::Active);
    rollback_writes();
    graph_->txn_table().set_aborted(txn_id_);
    finish(TxnLifecycle::Aborted);
}

// Chain heads move to the transaction's newest deltas before the commit
// request is enqueued, while the chain locks stay held. By the time the read
// epoch reaches the group's wts, every member's deltas are reachable through
// the index, so no snapshot can observe a partial group.
void Transaction::publish_commit_heads() {
    for (auto& [v, touch_ref] : touches_) {
        if (touch_ref.created_dsts.empty()) continue;
        VertexEntry& entry = graph_->index().entry(v);
        for (;;) {
            EdgeDeltaBlock* block = entry.block.load(std::memory_order_seq_cst);
            if (!block->enter_mutation()) {
                graph_->wait_for_install(entry, block);
                continue;
            }
            std::uint64_t version = entry.block_version.load(std::memory_order_acquire);
            VertexTouch& touch = touch_for(v, version, *block);
            for (const auto& [chain, head] : touch.private_heads) {
                block->chains().publish_head_locked(chain, txn_id_, head);
            }
            block->exit_mutation();
            break;
        }
    }
}

void Transaction::stamp_writes(timestamp_t wts) {
    for (auto& [v, touch_ref] : touches_) {
        VertexEntry& entry = graph_->index().entry(v);
        if (touch_ref.vertex_written) {
            // our vertex deltas form a contiguous run; readers may have
            // cooperatively stamped some of them to wts already
            VertexDelta* d = entry.vertex_head.load(std::memory_order_acquire);
            while (d != nullptr) {
                timestamp_t cur = d->creation_ts.load(std::memory_order_acquire);
                if (cur == txn_id_ || cur == wts) break;
                d = d->previous;
            }
            while (d != nullptr) {
                timestamp_t expected = txn_id_;
                d->creation_ts.compare_exchange_strong(expected, wts, std::memory_order_acq_rel);
                if (expected != txn_id_ && expected != wts) break;
                d = d->previous;
                if (d != nullptr) {
                    timestamp_t cur = d->creation_ts.load(std::memory_order_acquire);
                    if (cur != txn_id_ && cur != wts) break;
                }
            }
        }
        if (touch_ref.touched_dsts.empty()) continue;
        for (;;) {
            EdgeDeltaBlock* block = entry.block.load(std::memory_order_seq_cst);
            if (!block->enter_mutation()) {
                graph_->wait_for_install(entry, block);
                continue;
            }
            std::uint64_t version = entry.block_version.load(std::memory_order_acquire);
            VertexTouch& touch = touch_for(v, version, *block);
            // walk every chain we touched, locked or not: a consolidation
            // that raced cooperative stamping may have released a chain while
            // an invalidation field of ours is still unresolved on it
            std::set<chain_id_t> chains;
            for (vertex_t dst : touch.touched_dsts) {
                chains.insert(delta_chain_for(dst, block->delta_chain_count()));
            }
            for (chain_id_t chain : chains) {
                delta_offset_t off =
                    chain_head_of(block->chains().entry(chain).load(std::memory_order_acquire));
                while (off != 0) {
                    EdgeDelta& d = block->delta_at(off);
                    timestamp_t expected = txn_id_;
                    d.creation_ts.compare_exchange_strong(expected, wts, std::memory_order_acq_rel);
                    expected = txn_id_;
                    d.invalidation_ts.compare_exchange_strong(expected, wts, std::memory_order_acq_rel);
                    off = d.previous_offset;
                }
                if (touch.locked_chains.count(chain) != 0) {
                    block->chains().unlock_keep_head(chain, txn_id_);
                }
            }
            block->exit_mutation();
            break;
        }
    }
}

void Transaction::rollback_writes() {
    auto rollback_chain = [this](EdgeDeltaBlock& block, delta_offset_t start) {
        for (delta_offset_t off = start; off != 0;) {
            EdgeDelta& d = block.delta_at(off);
            timestamp_t expected = txn_id_;
            d.creation_ts.compare_exchange_strong(expected, kAbortedSentinel,
                                                  std::memory_order_acq_rel);
            expected = txn_id_;
            d.invalidation_ts.compare_exchange_strong(expected, 0, std::memory_order_acq_rel);
            off = d.previous_offset;
        }
    };
    for (auto& [v, touch_ref] : touches_) {
        VertexEntry& entry = graph_->index().entry(v);
        if (touch_ref.vertex_written) {
            VertexDelta* d = entry.vertex_head.load(std::memory_order_acquire);
            while (d != nullptr && d->creation_ts.load(std::memory_order_acquire) != txn_id_) {
                d = d->previous;
            }
            while (d != nullptr &&
                   d->creation_ts.load(std::memory_order_acquire) == txn_id_) {
                d->creation_ts.store(kAbortedSentinel, std::memory_order_release);
                d = d->previous;
            }
        }
        if (touch_ref.touched_dsts.empty() && touch_ref.locked_chains.empty()) continue;
        for (;;) {
            EdgeDeltaBlock* block = entry.block.load(std::memory_order_seq_cst);
            if (!block->enter_mutation()) {
                graph_->wait_for_install(entry, block);
                continue;
            }
            std::uint64_t version = entry.block_version.load(std::memory_order_acquire);
            DeltaChainsIndex& chains = block->chains();
            // Chains to scrub always derive from the destinations we touched:
            // an invalidation stamped just before an overflow lives on, and
            // relocates with, its destination's chain even though the chain
            // lock and the write itself never materialized here.
            std::set<chain_id_t> scrub;
            for (vertex_t dst : touch_ref.touched_dsts) {
                scrub.insert(delta_chain_for(dst, block->delta_chain_count()));
            }
            std::set<chain_id_t> owned;
            if (version == touch_ref.block_version) {
                owned = touch_ref.locked_chains;
                for (chain_id_t chain : owned) scrub.insert(chain);
            } else {
                // consolidation carried over only locks backed by one of our
                // in-progress deltas
                for (vertex_t dst : touch_ref.created_dsts) {
                    chain_id_t chain = delta_chain_for(dst, block->delta_chain_count());
                    std::uint64_t raw = chains.entry(chain).load(std::memory_order_acquire);
                    if (chain_locked(raw) && chain_owner_of(raw) == owner_tag(txn_id_)) {
                        owned.insert(chain);
                    }
                }
            }
            for (chain_id_t chain : scrub) {
                delta_offset_t start = 0;
                if (version == touch_ref.block_version) {
                    auto it = touch_ref.private_heads.find(chain);
                    if (it != touch_ref.private_heads.end()) start = it->second;
                }
                if (start == 0) {
                    start = chain_head_of(chains.entry(chain).load(std::memory_order_acquire));
                }
                rollback_chain(*block, start);
            }
            for (chain_id_t chain : owned) {
                chains.unlock_keep_head(chain, txn_id_);
            }
            block->exit_mutation();
            break;
        }
    }
}

void Transaction::finish(TxnLifecycle final_state) {
    graph_->txn_table().release_stamp_guard(txn_id_);
    graph_->registry().deregister(ticket_);
    state_ = final_state;
}

// ---------------------------------------------------------------------------
// ReadOnlyTransaction
// ---------------------------------------------------------------------------

ReadOnlyTransaction::~ReadOnlyTransaction() {
    if (graph_ != nullptr) graph_->registry().deregister(ticket_);
}

std::optional<std::string> ReadOnlyTransaction::read_vertex(vertex_t v) const {
    return lookup_vertex(*graph_, v, rts_, 0);
}

std::optional<std::string> ReadOnlyTransaction::get_edge(vertex_t src, vertex_t dst) const {
    VertexEntry* entry = graph_->index().entry_if_present(src);
    if (entry == nullptr) return std::nullopt;
    EdgeDeltaBlock* block = entry->block.load(std::memory_order_seq_cst);
    if (block == nullptr) return std::nullopt;
    chain_id_t chain = delta_chain_for(dst, block->delta_chain_count());
    return lookup_edge_from(*graph_, *block, block->chains().head(chain), dst, rts_, 0);
}

void ReadOnlyTransaction::scan_adjacency(
    vertex_t src, const std::function<void(vertex_t, std::string_view)>& emit) const {
    VertexEntry* entry = graph_->index().entry_if_present(src);
    if (entry == nullptr) return;
    EdgeDeltaBlock* block = entry->block.load(std::memory_order_seq_cst);
    if (block == nullptr) return;
    scan_block(*graph_, *block, rts_, 0, emit);
}

std::vector<std::pair<vertex_t, std::string>> ReadOnlyTransaction::scan_adjacency(vertex_t src) const {
    std::vector<std::pair<vertex_t, std::string>> out;
    scan_adjacency(src, [&](vertex_t dst, std::string_view prop) { out.emplace_back(dst, std::string(prop)); });
    return out;
}

} // namespace deltagraph
