#include "deltagraph/graph.hpp"

#include <algorithm>
#include <bit>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace deltagraph {

namespace {

void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_ia32_pause();
#else
    std::this_thread::yield();
#endif
}

std::uint32_t next_pow2(std::uint64_t n) {
    if (n <= 1) return 1;
    return static_cast<std::uint32_t>(std::bit_ceil(n));
}

} // namespace

Graph::Graph(EngineConfig config)
    : config_(config),
      allocator_(config.poison_freed_blocks),
      table_(config.txn_table_capacity),
      commit_manager_(table_, config.initial_read_epoch, config.run_commit_thread) {}

Graph::~Graph() {
    commit_manager_.stop();
    // everything is dead now; drop retired blocks regardless of horizon
    retired_.reclaim(registry_, allocator_, table_, /*ignore_horizon=*/true);
    index_.for_each_entry([&](vertex_t, VertexEntry& e) {
        allocator_.release(e.block.load(std::memory_order_relaxed));
        VertexDelta* d = e.vertex_head.load(std::memory_order_relaxed);
        while (d != nullptr) {
            VertexDelta* prev = d->previous;
            std::free(d);
            d = prev;
        }
    });
}

// Publish-then-recheck registration: the read timestamp is final only once a
// re-read of the epoch matches the value already visible in the registry.
// Any consolidation or reclamation that could have missed the registration
// then provably ran with a horizon at or below this rts.
std::pair<timestamp_t, ActiveRegistry::Ticket> Graph::register_snapshot() {
    timestamp_t rts = commit_manager_.read_epoch();
    ActiveRegistry::Ticket ticket = registry_.register_rts(rts);
    for (;;) {
        timestamp_t again = commit_manager_.read_epoch();
        if (again == rts) break;
        rts = again;
        registry_.update(ticket, rts);
    }
    return {rts, ticket};
}

Transaction Graph::begin_rw() {
    maybe_reclaim();
    timestamp_t txn_id = table_.try_register_transaction();
    while (txn_id == 0) {
        // the slot is pinned by an unreclaimed retired block or a straggling
        // stamper; free what we can and take the next sequence number
        reclaim_now();
        std::this_thread::yield();
        txn_id = table_.try_register_transaction();
    }
    auto [rts, ticket] = register_snapshot();
    return Transaction(this, txn_id, rts, ticket);
}

ReadOnlyTransaction Graph::begin_ro() {
    auto [rts, ticket] = register_snapshot();
    return ReadOnlyTransaction(this, rts, ticket, index_.next_vertex());
}

ReadOnlyTransaction Graph::begin_ro_at(timestamp_t rts) {
    assert(is_epoch(rts) && rts <= commit_manager_.read_epoch());
    ActiveRegistry::Ticket ticket = registry_.register_rts(rts);
    return ReadOnlyTransaction(this, rts, ticket, index_.next_vertex());
}

std::size_t Graph::reclaim_now() {
    std::size_t freed = retired_.reclaim(registry_, allocator_, table_);
    reclaimed_.fetch_add(freed, std::memory_order_relaxed);
    return freed;
}

void Graph::maybe_reclaim() {
    thread_local std::uint32_t txn_counter = 0;
    if (config_.reclaim_period != 0 && ++txn_counter >= config_.reclaim_period) {
        txn_counter = 0;
        reclaim_now();
    }
}

GraphStats Graph::stats() const {
    GraphStats s;
    s.consolidations = consolidations_.load(std::memory_order_relaxed);
    s.reclaimed_blocks = reclaimed_.load(std::memory_order_relaxed);
    s.live_blocks = allocator_.live_blocks();
    s.retired_blocks = retired_.size();
    return s;
}

EdgeDeltaBlock* Graph::block_for_write(VertexEntry& entry, vertex_t v) {
    EdgeDeltaBlock* block = entry.block.load(std::memory_order_seq_cst);
    if (block != nullptr) return block;
    EdgeDeltaBlock* fresh = allocator_.allocate(v, config_.initial_block_capacity,
                                                config_.initial_delta_chain_count,
                                                commit_manager_.write_epoch());
    EdgeDeltaBlock* expected = nullptr;
    // the initial install keeps block_version at 0; the version only moves
    // between consolidation's writer drain and its install, so the value a
    // mutation span observes is stable for that span's block
    if (entry.block.compare_exchange_strong(expected, fresh, std::memory_order_seq_cst)) {
        return fresh;
    }
    allocator_.release(fresh);
    return expected;
}

void Graph::wait_for_install(VertexEntry& entry, const EdgeDeltaBlock* old_block) {
    std::uint32_t spins = 0;
    while (entry.block.load(std::memory_order_seq_cst) == old_block) {
        if (++spins < 256) {
            cpu_relax();
        } else {
            std::this_thread::yield();
        }
    }
}

void Graph::handle_overflow(VertexEntry& entry, EdgeDeltaBlock* block) {
    if (block->try_enter_consolidation()) {
        consolidate(entry, block);
    } else {
        wait_for_install(entry, block);
    }
}

// Rebuilds an overflowed block: keeps every delta that is the latest version
// of its edge, any version still visible at or after the retention horizon,
// and every in-progress delta (preserving its owner's chain locks). Readers
// keep scanning the old block throughout; the old block is retired and freed
// once no snapshot can reach it.
void Graph::consolidate(VertexEntry& entry, EdgeDeltaBlock* block) {
    // wait for in-flight publications, stamping and rollbacks to finish
    std::uint32_t spins = 0;
    while (block->writer_count() != 0) {
        if (++spins < 1024) {
            cpu_relax();
        } else {
            std::this_thread::yield();
        }
    }

    const std::uint32_t extent = block->delta_extent();
    const std::uint32_t old_chain_count = block->delta_chain_count();

    // latest non-aborted delta per destination (newest wins)
    std::unordered_map<vertex_t, delta_offset_t> latest;
    for (delta_offset_t off = extent; off >= kDeltaRecordSize; off -= kDeltaRecordSize) {
        EdgeDelta& d = block->delta_at(off);
        timestamp_t creation = d.creation_ts.load(std::memory_order_acquire);
        assert(creation != 0);  // writer count drained: everything is published
        if (creation == kAbortedSentinel) continue;
        latest.try_emplace(d.dst, off);
    }

    // retention horizon: versions invalidated at or below it are invisible
    // to every live snapshot and to every future snapshot (future rts >=
    // current read epoch)
    timestamp_t horizon = std::min(registry_.min_rts(), commit_manager_.read_epoch());

    std::vector<delta_offset_t> retained;  // ascending offset = oldest first
    std::vector<timestamp_t> pins;
    std::unordered_set<timestamp_t> pin_set;
    bool has_in_progress = false;
    std::uint64_t data_bytes = 0;
    std::uint64_t live_edges = 0;
    for (delta_offset_t off = kDeltaRecordSize; off <= extent; off += kDeltaRecordSize) {
        EdgeDelta& d = block->delta_at(off);
        timestamp_t creation = d.creation_ts.load(std::memory_order_acquire);
        timestamp_t invalidation = d.invalidation_ts.load(std::memory_order_acquire);
        if (is_txn_id(creation) && pin_set.insert(creation).second) pins.push_back(creation);
        if (is_txn_id(invalidation) && pin_set.insert(invalidation).second) pins.push_back(invalidation);
        if (creation == kAbortedSentinel) continue;
        bool is_latest = latest[d.dst] == off;
        bool keep = is_latest;
        if (!keep && is_txn_id(creation)) keep = true;  // in-progress write
        if (!keep) {
            // still visible to some live or future snapshot?
            if (invalidation == 0 || is_txn_id(invalidation)) {
                keep = true;
            } else if (invalidation > horizon) {
                keep = true;
            }
        }
        if (!keep) continue;
        retained.push_back(off);
        if (is_txn_id(creation)) has_in_progress = true;
        if (!d.inline_property()) data_bytes += d.data_size;
        if (is_latest && d.kind != DeltaKind::Delete) ++live_edges;
    }

    // chain count follows the live degree; never shrink below the old count
    // while in-progress deltas exist, so distinct owners' chain locks stay
    // disjoint after the rebuild (power-of-two counts divide evenly)
    std::uint32_t chain_count =
        std::max<std::uint32_t>(4, next_pow2((live_edges + config_.target_chain_length - 1) /
                                             config_.target_chain_length));
    if (has_in_progress) chain_count = std::max(chain_count, old_chain_count);

    std::uint64_t need = retained.size() * std::uint64_t{kDeltaRecordSize} + data_bytes +
                         EdgeDeltaBlock::allocation_size(0, chain_count);
    std::uint32_t capacity = std::max<std::uint32_t>(config_.min_block_capacity, next_pow2(2 * need));

    EdgeDeltaBlock* fresh = allocator_.allocate(block->owner(), capacity, chain_count,
                                                commit_manager_.write_epoch());

    // copy oldest-first so each chain's previous_offset links strictly
    // decrease and the newest retained delta ends up as the chain head
    std::unordered_map<delta_offset_t, delta_offset_t> relocated;
    std::vector<delta_offset_t> chain_heads(chain_count, 0);
    std::vector<timestamp_t> chain_lock_owner(chain_count, 0);
    for (delta_offset_t off : retained) {
        EdgeDelta& src = block->delta_at(off);
        std::string_view property = block->property_of(src);
        std::uint32_t external = src.inline_property() ? 0 : src.data_size;
        auto result = fresh->allocate_delta(external);
        auto* slots = std::get_if<AllocatedSlots>(&result);
        assert(slots != nullptr);
        chain_id_t chain = delta_chain_for(src.dst, chain_count);
        delta_offset_t prev_version = 0;
        if (src.previous_version_offset != 0) {
            auto it = relocated.find(src.previous_version_offset);
            if (it != relocated.end()) prev_version = it->second;
        }
        EdgeDelta& dst = fresh->delta_at(slots->delta_offset);
        dst.dst = src.dst;
        dst.kind = src.kind;
        dst.previous_offset = chain_heads[chain];
        dst.previous_version_offset = prev_version;
        dst.data_size = src.data_size;
        if (src.inline_property()) {
            if (src.data_size != 0) std::memcpy(dst.inline_data, property.data(), property.size());
        } else {
            dst.data_offset = slots->data_offset;
            std::memcpy(fresh->data_at(slots->data_offset), property.data(), property.size());
        }
        timestamp_t creation = src.creation_ts.load(std::memory_order_acquire);
        dst.invalidation_ts.store(src.invalidation_ts.load(std::memory_order_acquire),
                                  std::memory_order_relaxed);
        dst.creation_ts.store(creation, std::memory_order_relaxed);
        chain_heads[chain] = slots->delta_offset;
        if (is_txn_id(creation)) chain_lock_owner[chain] = creation;
        relocated.emplace(off, slots->delta_offset);
    }

    for (chain_id_t c = 0; c < chain_count; ++c) {
        std::uint64_t raw = chain_lock_owner[c] != 0
                                ? make_locked_entry(chain_lock_owner[c], chain_heads[c])
                                : static_cast<std::uint64_t>(chain_heads[c]);
        fresh->chains().init_entry(c, raw);
    }

    // pin table slots before the install so no owner can recycle its slot
    // while the old block still carries its id
    for (timestamp_t id : pins) {
        table_.pin_stamp_guard(id);
    }

    entry.block_version.fetch_add(1, std::memory_order_seq_cst);
    entry.block.store(fresh, std::memory_order_seq_cst);

    retired_.retire(block, commit_manager_.write_epoch(), std::move(pins));
    consolidations_.fetch_add(1, std::memory_order_relaxed);
}

std::size_t Graph::resolve_sweep() {
    std::size_t unresolved = 0;
    index_.for_each_entry([&](vertex_t, VertexEntry& e) {
        VertexDelta* vd = e.vertex_head.load(std::memory_order_acquire);
        while (vd != nullptr) {
            resolve_creation(vd->creation_ts, table_);
            if (is_txn_id(vd->creation_ts.load(std::memory_order_acquire))) ++unresolved;
            vd = vd->previous;
        }
        EdgeDeltaBlock* block = e.block.load(std::memory_order_seq_cst);
        if (block == nullptr) return;
        std::uint32_t extent = block->delta_extent();
        for (delta_offset_t off = kDeltaRecordSize; off <= extent; off += kDeltaRecordSize) {
            EdgeDelta& d = block->delta_at(off);
            if (!d.published()) continue;
            resolve_creation(d.creation_ts, table_);
            if (d.invalidation_ts.load(std::memory_order_acquire) != 0) {
                resolve_invalidation(d.invalidation_ts, table_);
            }
            if (is_txn_id(d.creation_ts.load(std::memory_order_acquire))) ++unresolved;
            if (is_txn_id(d.invalidation_ts.load(std::memory_order_acquire))) ++unresolved;
        }
    });
    return unresolved;
}

} // namespace deltagraph
