#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deltagraph/block.hpp"
#include "deltagraph/block_allocator.hpp"
#include "deltagraph/commit_manager.hpp"
#include "deltagraph/maintenance.hpp"
#include "deltagraph/transaction_table.hpp"
#include "deltagraph/types.hpp"
#include "deltagraph/vertex_index.hpp"
#include "deltagraph/visibility.hpp"

namespace deltagraph {

class Graph;

enum class TxnLifecycle { Active, CommitPending, Committed, Aborted };

enum class VertexWriteResult { Ok, Conflict };
enum class EdgeUpsertResult { Inserted, Updated, Conflict };
enum class EdgeDeleteResult { Deleted, NotFound, Conflict };

struct GraphStats {
    std::uint64_t consolidations = 0;
    std::uint64_t reclaimed_blocks = 0;
    std::uint64_t live_blocks = 0;
    std::uint64_t retired_blocks = 0;
};

// Per-vertex write-side state of one transaction. locked_chains and
// private_heads are valid only for block_version; consolidation moves the
// transaction's deltas to the new block and re-expresses its locks there, so
// both are rebuilt from created_dsts when the version moved on.
struct VertexTouch {
    std::uint64_t block_version = 0;
    std::set<chain_id_t> locked_chains;
    std::map<chain_id_t, delta_offset_t> private_heads;
    std::set<vertex_t> created_dsts;   // dsts with a delta created by this txn
    std::set<vertex_t> touched_dsts;   // created_dsts plus prior versions invalidation-stamped
    bool vertex_written = false;
};

// Read-write transaction handle. Owned by one worker thread at a time; the
// engine as a whole supports many concurrent transactions. A conflict on any
// operation aborts the whole transaction.
class Transaction {
public:
    Transaction(Transaction&& other) noexcept
        : graph_(other.graph_),
          txn_id_(other.txn_id_),
          rts_(other.rts_),
          ticket_(other.ticket_),
          state_(other.state_),
          touches_(std::move(other.touches_)),
          op_count_(other.op_count_) {
        other.graph_ = nullptr;
    }
    Transaction& operator=(Transaction&&) = delete;
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;
    ~Transaction();

    timestamp_t txn_id() const noexcept { return txn_id_; }
    timestamp_t rts() const noexcept { return rts_; }
    TxnLifecycle state() const noexcept { return state_; }

    std::optional<std::string> read_vertex(vertex_t v);
    VertexWriteResult write_vertex(vertex_t v, std::string_view property);

    EdgeUpsertResult insert_edge(vertex_t src, vertex_t dst, std::string_view property);
    EdgeDeleteResult delete_edge(vertex_t src, vertex_t dst);

    std::optional<std::string> get_edge(vertex_t src, vertex_t dst);
    void scan_adjacency(vertex_t src, const std::function<void(vertex_t, std::string_view)>& emit);
    std::vector<std::pair<vertex_t, std::string>> scan_adjacency(vertex_t src);

    // Returns the commit timestamp. A transaction with no writes commits
    // trivially at its own read timestamp.
    timestamp_t commit();
    void abort();

private:
    friend class Graph;
    Transaction(Graph* graph, timestamp_t txn_id, timestamp_t rts, ActiveRegistry::Ticket ticket)
        : graph_(graph), txn_id_(txn_id), rts_(rts), ticket_(ticket) {}

    VertexTouch& touch_for(vertex_t v, std::uint64_t block_version, EdgeDeltaBlock& block);
    delta_offset_t search_head(const VertexTouch& touch, chain_id_t chain, DeltaChainsIndex& chains);

    template <typename R>
    R conflict_abort();

    void publish_commit_heads();
    void stamp_writes(timestamp_t wts);
    void rollback_writes();
    void finish(TxnLifecycle final_state);

    Graph* graph_;
    timestamp_t txn_id_;
    timestamp_t rts_;
    ActiveRegistry::Ticket ticket_;
    TxnLifecycle state_ = TxnLifecycle::Active;
    std::unordered_map<vertex_t, VertexTouch> touches_;
    std::uint64_t op_count_ = 0;
};

// Snapshot handle for analytics; immutable and shareable across threads.
class ReadOnlyTransaction {
public:
    ReadOnlyTransaction(ReadOnlyTransaction&& other) noexcept
        : graph_(other.graph_), rts_(other.rts_), ticket_(other.ticket_) {
        other.graph_ = nullptr;
    }
    ReadOnlyTransaction& operator=(ReadOnlyTransaction&&) = delete;
    ReadOnlyTransaction(const ReadOnlyTransaction&) = delete;
    ReadOnlyTransaction& operator=(const ReadOnlyTransaction&) = delete;
    ~ReadOnlyTransaction();

    timestamp_t rts() const noexcept { return rts_; }

    std::optional<std::string> read_vertex(vertex_t v) const;
    std::optional<std::string> get_edge(vertex_t src, vertex_t dst) const;
    void scan_adjacency(vertex_t src, const std::function<void(vertex_t, std::string_view)>& emit) const;
    std::vector<std::pair<vertex_t, std::string>> scan_adjacency(vertex_t src) const;

    vertex_t vertex_count_snapshot() const noexcept { return vertex_limit_ - 1; }

private:
    friend class Graph;
    ReadOnlyTransaction(Graph* graph, timestamp_t rts, ActiveRegistry::Ticket ticket, vertex_t limit)
        : graph_(graph), rts_(rts), ticket_(ticket), vertex_limit_(limit) {}

    Graph* graph_;
    timestamp_t rts_;
    ActiveRegistry::Ticket ticket_;
    vertex_t vertex_limit_;
};

// The engine: latch-free multi-version delta storage with snapshot-isolation
// transactions, chain-level concurrency control, hybrid group commit,
// on-overflow consolidation and lazy reclamation.
class Graph {
public:
    explicit Graph(EngineConfig config = {});
    ~Graph();

    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Transaction begin_rw();
    ReadOnlyTransaction begin_ro();

    // Snapshot at an explicit past epoch; the caller is responsible for the
    // engine being quiescent enough that the epoch's versions still exist.
    ReadOnlyTransaction begin_ro_at(timestamp_t rts);

    // Extends the dense id space to include v; idempotent and safe from
    // inside or outside transactions.
    void ensure_vertex(vertex_t v) { index_.ensure(v); }
    vertex_t vertex_count() const noexcept { return index_.next_vertex() - 1; }

    timestamp_t read_epoch() const noexcept { return commit_manager_.read_epoch(); }
    timestamp_t write_epoch() const noexcept { return commit_manager_.write_epoch(); }

    // Deterministic epoch control (fixtures, benchmarks); engine must be
    // commit-quiescent.
    void advance_write_epoch_to(timestamp_t wts) { commit_manager_.advance_write_epoch_to(wts); }

    std::size_t reclaim_now();

    // Resolves every delta timestamp field once; returns how many fields
    // still hold transaction IDs afterwards (0 once all owners terminated).
    std::size_t resolve_sweep();

    GraphStats stats() const;

    const EngineConfig& config() const noexcept { return config_; }

    VertexIndex& index() noexcept { return index_; }
    TransactionTable& txn_table() noexcept { return table_; }
    CommitManager& commit_manager() noexcept { return commit_manager_; }
    ActiveRegistry& registry() noexcept { return registry_; }

private:
    friend class Transaction;
    friend class ReadOnlyTransaction;

    std::pair<timestamp_t, ActiveRegistry::Ticket> register_snapshot();
    EdgeDeltaBlock* block_for_write(VertexEntry& entry, vertex_t v);
    void wait_for_install(VertexEntry& entry, const EdgeDeltaBlock* old_block);
    void handle_overflow(VertexEntry& entry, EdgeDeltaBlock* block);
    void consolidate(VertexEntry& entry, EdgeDeltaBlock* block);
    void maybe_reclaim();

    EngineConfig config_;
    BlockAllocator allocator_;
    VertexIndex index_;
    TransactionTable table_;
    ActiveRegistry registry_;
    RetiredQueue retired_;
    std::atomic<std::uint64_t> consolidations_{0};
    std::atomic<std::uint64_t> reclaimed_{0};
    CommitManager commit_manager_;  // last member: its thread touches everything above
};

} // namespace deltagraph
