// Test-only oracles, independent of the engine's storage and visibility
// paths: a map-of-maps graph replayed from committed histories in wts order,
// single-threaded reference analytics, and a randomized concurrent history
// runner whose per-epoch snapshots are compared against engine scans.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "deltagraph/analytics.hpp"
#include "deltagraph/graph.hpp"

namespace oracle {

using deltagraph::Graph;
using deltagraph::timestamp_t;
using deltagraph::vertex_t;

// ---------------------------------------------------------------------------
// map-of-maps graph state
// ---------------------------------------------------------------------------

struct OracleGraph {
    std::map<vertex_t, std::map<vertex_t, std::string>> adjacency;
    std::map<vertex_t, std::string> vertex_props;

    void insert_edge(vertex_t u, vertex_t v, std::string prop) { adjacency[u][v] = std::move(prop); }
    void delete_edge(vertex_t u, vertex_t v) {
        auto it = adjacency.find(u);
        if (it != adjacency.end()) it->second.erase(v);
    }
    void write_vertex(vertex_t v, std::string prop) { vertex_props[v] = std::move(prop); }
};

struct AppliedOp {
    enum class Kind { InsertEdge, DeleteEdge, WriteVertex };
    Kind kind;
    vertex_t u = 0;
    vertex_t v = 0;
    std::string prop;
};

struct CommittedTxn {
    timestamp_t wts = 0;
    std::vector<AppliedOp> ops;
};

inline OracleGraph replay(std::vector<CommittedTxn> txns, timestamp_t up_to_epoch) {
    std::stable_sort(txns.begin(), txns.end(),
                     [](const CommittedTxn& a, const CommittedTxn& b) { return a.wts < b.wts; });
    OracleGraph g;
    for (const CommittedTxn& txn : txns) {
        if (txn.wts > up_to_epoch) break;
        for (const AppliedOp& op : txn.ops) {
            switch (op.kind) {
                case AppliedOp::Kind::InsertEdge: g.insert_edge(op.u, op.v, op.prop); break;
                case AppliedOp::Kind::DeleteEdge: g.delete_edge(op.u, op.v); break;
                case AppliedOp::Kind::WriteVertex: g.write_vertex(op.v, op.prop); break;
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// engine snapshot vs oracle comparison
// ---------------------------------------------------------------------------

inline std::map<vertex_t, std::map<vertex_t, std::string>> engine_snapshot(Graph& g, timestamp_t rts,
                                                                           vertex_t max_vertex) {
    std::map<vertex_t, std::map<vertex_t, std::string>> out;
    deltagraph::ReadOnlyTransaction ro = g.begin_ro_at(rts);
    for (vertex_t v = 1; v <= max_vertex; ++v) {
        ro.scan_adjacency(v, [&](vertex_t dst, std::string_view prop) {
            out[v].emplace(dst, std::string(prop));
        });
        if (out.count(v) != 0 && out[v].empty()) out.erase(v);
    }
    return out;
}

inline bool snapshots_equal(const OracleGraph& oracle,
                            const std::map<vertex_t, std::map<vertex_t, std::string>>& engine) {
    std::map<vertex_t, std::map<vertex_t, std::string>> expect;
    for (const auto& [u, nbrs] : oracle.adjacency) {
        if (!nbrs.empty()) expect[u] = nbrs;
    }
    return expect == engine;
}

// Per-epoch scan equality over a committed history, with the quadratic
// lookup/scan agreement check applied every lookup_stride epochs.
inline bool verify_history(Graph& g, const std::vector<CommittedTxn>& committed,
                           vertex_t max_vertex, timestamp_t first_epoch, timestamp_t last_epoch,
                           std::string* diagnostic = nullptr, timestamp_t lookup_stride = 1) {
    for (timestamp_t e = first_epoch; e <= last_epoch; ++e) {
        OracleGraph expect = replay(committed, e);
        auto actual = engine_snapshot(g, e, max_vertex);
        if (!snapshots_equal(expect, actual)) {
            if (diagnostic != nullptr) *diagnostic = "snapshot mismatch at epoch " + std::to_string(e);
            return false;
        }
        if ((e - first_epoch) % lookup_stride != 0) continue;
        // lookup path must agree with the scan path
        deltagraph::ReadOnlyTransaction ro = g.begin_ro_at(e);
        for (vertex_t v = 1; v <= max_vertex; ++v) {
            auto it = actual.find(v);
            std::size_t degree = it == actual.end() ? 0 : it->second.size();
            std::size_t found = 0;
            for (vertex_t u = 1; u <= max_vertex; ++u) {
                auto prop = ro.get_edge(v, u);
                bool in_scan = it != actual.end() && it->second.count(u) != 0;
                if (prop.has_value() != in_scan) {
                    if (diagnostic != nullptr) {
                        *diagnostic = "get_edge/scan disagree at epoch " + std::to_string(e) + " edge " +
                                      std::to_string(v) + "->" + std::to_string(u);
                    }
                    return false;
                }
                if (prop.has_value()) {
                    ++found;
                    if (*prop != it->second.at(u)) {
                        if (diagnostic != nullptr) *diagnostic = "property mismatch";
                        return false;
                    }
                }
            }
            if (found != degree) {
                if (diagnostic != nullptr) *diagnostic = "degree mismatch";
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// randomized concurrent history runner
// ---------------------------------------------------------------------------

struct HistoryConfig {
    std::uint32_t threads = 4;
    std::uint32_t txns_per_thread = 50;
    std::uint32_t ops_per_txn = 4;
    vertex_t vertices = 16;
    std::uint64_t seed = 1;
    bool with_vertex_writes = false;
};

struct HistoryResult {
    std::vector<CommittedTxn> committed;
    std::uint64_t aborted = 0;
    timestamp_t first_epoch = 0;
    timestamp_t last_epoch = 0;
};

inline HistoryResult run_random_history(Graph& g, const HistoryConfig& cfg) {
    for (vertex_t v = 1; v <= cfg.vertices; ++v) g.ensure_vertex(v);
    HistoryResult result;
    result.first_epoch = g.read_epoch();
    // pin the initial snapshot so consolidation keeps every epoch we verify
    deltagraph::ReadOnlyTransaction pin = g.begin_ro();

    std::vector<std::vector<CommittedTxn>> per_thread(cfg.threads);
    std::vector<std::uint64_t> aborts(cfg.threads, 0);
    std::vector<std::thread> workers;
    for (std::uint32_t t = 0; t < cfg.threads; ++t) {
        workers.emplace_back([&, t] {
            std::mt19937_64 rng(cfg.seed * 1000003 + t);
            std::uniform_int_distribution<vertex_t> pick(1, cfg.vertices);
            std::uniform_int_distribution<int> action(0, 99);
            for (std::uint32_t i = 0; i < cfg.txns_per_thread; ++i) {
                deltagraph::Transaction txn = g.begin_rw();
                CommittedTxn record;
                bool conflicted = false;
                for (std::uint32_t op = 0; op < cfg.ops_per_txn && !conflicted; ++op) {
                    vertex_t u = pick(rng);
                    vertex_t v = pick(rng);
                    int a = action(rng);
                    if (a < 45) {
                        std::string prop = "e" + std::to_string(u) + "_" + std::to_string(v) + "_" +
                                           std::to_string(rng() % 1000);
                        auto r = txn.insert_edge(u, v, prop);
                        if (r == deltagraph::EdgeUpsertResult::Conflict) {
                            conflicted = true;
                        } else {
                            record.ops.push_back({AppliedOp::Kind::InsertEdge, u, v, prop});
                        }
                    } else if (a < 70) {
                        auto r = txn.delete_edge(u, v);
                        if (r == deltagraph::EdgeDeleteResult::Conflict) {
                            conflicted = true;
                        } else if (r == deltagraph::EdgeDeleteResult::Deleted) {
                            record.ops.push_back({AppliedOp::Kind::DeleteEdge, u, v, {}});
                        }
                    } else if (a < 80 && cfg.with_vertex_writes) {
                        std::string prop = "v" + std::to_string(u) + "_" + std::to_string(rng() % 1000);
                        if (txn.write_vertex(u, prop) == deltagraph::VertexWriteResult::Conflict) {
                            conflicted = true;
                        } else {
                            record.ops.push_back({AppliedOp::Kind::WriteVertex, 0, u, prop});
                        }
                    } else if (a < 90) {
                        (void)txn.get_edge(u, v);
                    } else {
                        txn.scan_adjacency(u, [](vertex_t, std::string_view) {});
                    }
                }
                if (conflicted) {
                    ++aborts[t];
                    continue;  // engine already rolled the transaction back
                }
                record.wts = txn.commit();
                if (!record.ops.empty()) per_thread[t].push_back(std::move(record));
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& chunk : per_thread) {
        result.committed.insert(result.committed.end(), std::make_move_iterator(chunk.begin()),
                                std::make_move_iterator(chunk.end()));
    }
    for (std::uint64_t a : aborts) result.aborted += a;
    result.last_epoch = g.read_epoch();
    return result;
}

// ---------------------------------------------------------------------------
// reference analytics (single-threaded, independent of engine scan order)
// ---------------------------------------------------------------------------

inline std::vector<double> ref_pagerank(const std::vector<std::vector<vertex_t>>& adj,
                                        std::uint32_t iterations, double damping) {
    std::size_t n = adj.size() - 1;  // index 0 unused
    std::vector<double> cur(n + 1, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    std::vector<double> next(n + 1, 0.0);
    if (n == 0) return cur;
    for (std::uint32_t it = 0; it < iterations; ++it) {
        double dangling = 0.0;
        for (std::size_t v = 1; v <= n; ++v) {
            if (adj[v].empty()) dangling += cur[v];
        }
        double base = (1.0 - damping) / static_cast<double>(n) +
                      damping * dangling / static_cast<double>(n);
        for (std::size_t v = 1; v <= n; ++v) {
            double sum = 0.0;
            for (vertex_t u : adj[v]) sum += cur[u] / static_cast<double>(adj[u].size());
            next[v] = base + damping * sum;
        }
        std::swap(cur, next);
    }
    double total = 0.0;
    for (std::size_t v = 1; v <= n; ++v) total += cur[v];
    for (std::size_t v = 1; v <= n; ++v) cur[v] /= total;
    return cur;
}

inline std::vector<double> ref_dijkstra(
    const std::vector<std::vector<std::pair<vertex_t, double>>>& adj, vertex_t source) {
    std::size_t n = adj.size() - 1;
    std::vector<double> dist(n + 1, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, vertex_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (auto [u, w] : adj[v]) {
            if (d + w < dist[u]) {
                dist[u] = d + w;
                heap.emplace(d + w, u);
            }
        }
    }
    return dist;
}

} // namespace oracle
