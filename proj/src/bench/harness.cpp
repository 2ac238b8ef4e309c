#include "deltagraph/bench/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "deltagraph/analytics.hpp"

namespace deltagraph::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t peak_rss_bytes() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream fields(line.substr(6));
            std::uint64_t kb = 0;
            fields >> kb;
            return kb * 1024;
        }
    }
    return 0;
}

// Updates are partitioned by undirected edge so all operations on one edge
// run on one worker in log order; the final state then equals a sequential
// checked replay of the log.
std::size_t edge_partition(const UpdateRecord& rec, std::size_t threads) {
    vertex_t lo = std::min(rec.src, rec.dst);
    vertex_t hi = std::max(rec.src, rec.dst);
    return (lo * 10000037ull + hi) % threads;
}

struct WorkerTally {
    std::uint64_t committed = 0;
    std::uint64_t aborted = 0;
};

void apply_record(Graph& graph, const UpdateRecord& rec, WorkerTally& tally) {
    std::string property = weight_property(rec.weight);
    for (std::uint32_t attempt = 0;; ++attempt) {
        Transaction txn = graph.begin_rw();
        graph.ensure_vertex(rec.src);
        graph.ensure_vertex(rec.dst);
        bool conflicted = false;
        if (rec.op == UpdateOp::Insert) {
            conflicted = txn.insert_edge(rec.src, rec.dst, property) == EdgeUpsertResult::Conflict;
            if (!conflicted) {
                conflicted = txn.insert_edge(rec.dst, rec.src, property) == EdgeUpsertResult::Conflict;
            }
        } else {
            conflicted = txn.delete_edge(rec.src, rec.dst) == EdgeDeleteResult::Conflict;
            if (!conflicted) {
                conflicted = txn.delete_edge(rec.dst, rec.src) == EdgeDeleteResult::Conflict;
            }
        }
        if (!conflicted) {
            txn.commit();
            ++tally.committed;
            return;
        }
        ++tally.aborted;
        if (attempt >= 10) {
            auto shift = std::min<std::uint32_t>(attempt - 10, 10);
            std::this_thread::sleep_for(std::chrono::microseconds(1u << shift));
        }
    }
}

struct StreamResult {
    std::uint64_t committed = 0;
    std::uint64_t aborted = 0;
    double seconds = 0.0;
};

StreamResult stream_updates(Graph& graph, const UpdateLog& log, std::size_t first,
                            std::size_t last, std::uint32_t threads) {
    std::vector<WorkerTally> tallies(threads);
    auto t0 = Clock::now();
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (std::uint32_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            for (std::size_t i = first; i < last; ++i) {
                const UpdateRecord& rec = log.records[i];
                if (edge_partition(rec, threads) != t) continue;
                apply_record(graph, rec, tallies[t]);
            }
        });
    }
    for (auto& w : workers) w.join();
    auto t1 = Clock::now();
    StreamResult result;
    result.seconds = std::chrono::duration<double>(t1 - t0).count();
    for (const auto& tally : tallies) {
        result.committed += tally.committed;
        result.aborted += tally.aborted;
    }
    return result;
}

struct EdgeKeyHash {
    std::size_t operator()(const std::pair<vertex_t, vertex_t>& e) const noexcept {
        return std::hash<std::uint64_t>{}(e.first * 1000003037ull ^ e.second);
    }
};

// Sequential checked replay: the independent oracle for end-state checks.
std::unordered_map<std::pair<vertex_t, vertex_t>, double, EdgeKeyHash> replay_oracle(
    const UpdateLog& log, std::size_t limit) {
    std::unordered_map<std::pair<vertex_t, vertex_t>, double, EdgeKeyHash> edges;
    edges.reserve(2 * limit);
    for (std::size_t i = 0; i < limit; ++i) {
        const UpdateRecord& rec = log.records[i];
        if (rec.op == UpdateOp::Insert) {
            edges[{rec.src, rec.dst}] = rec.weight;
            edges[{rec.dst, rec.src}] = rec.weight;
        } else {
            edges.erase({rec.src, rec.dst});
            edges.erase({rec.dst, rec.src});
        }
    }
    return edges;
}

bool verify_end_state(Graph& graph, const UpdateLog& log) {
    auto oracle = replay_oracle(log, log.records.size());
    ReadOnlyTransaction snapshot = graph.begin_ro();
    std::uint64_t seen = 0;
    bool ok = true;
    for (vertex_t v = 1; v <= graph.vertex_count() && ok; ++v) {
        snapshot.scan_adjacency(v, [&](vertex_t dst, std::string_view prop) {
            ++seen;
            auto it = oracle.find({v, dst});
            if (it == oracle.end()) {
                ok = false;
                return;
            }
            double w = 0.0;
            if (prop.size() >= sizeof(double)) std::memcpy(&w, prop.data(), sizeof(double));
            if (w != it->second) ok = false;
        });
    }
    return ok && seen == oracle.size();
}

std::uint64_t count_directed_edges(Graph& graph) {
    ReadOnlyTransaction snapshot = graph.begin_ro();
    std::uint64_t edges = 0;
    for (vertex_t v = 1; v <= graph.vertex_count(); ++v) {
        snapshot.scan_adjacency(v, [&](vertex_t, std::string_view) { ++edges; });
    }
    return edges;
}

} // namespace

std::string weight_property(double weight) {
    std::string bytes(sizeof(double), '\0');
    std::memcpy(bytes.data(), &weight, sizeof(double));
    return bytes;
}

EngineConfig config_from_env(EngineConfig base) {
    if (const char* v = std::getenv("DELTAGRAPH_BLOCK_CAPACITY")) {
        base.initial_block_capacity = static_cast<std::uint32_t>(std::strtoul(v, nullptr, 10));
    }
    if (const char* v = std::getenv("DELTAGRAPH_TARGET_CHAIN_LEN")) {
        base.target_chain_length = static_cast<std::uint32_t>(std::strtoul(v, nullptr, 10));
    }
    if (const char* v = std::getenv("DELTAGRAPH_RECLAIM_PERIOD")) {
        base.reclaim_period = static_cast<std::uint32_t>(std::strtoul(v, nullptr, 10));
    }
    return base;
}

BenchReport run_construction(Graph& graph, const UpdateLog& log, std::uint32_t threads) {
    BenchReport report;
    report.workload = "construction";
    report.threads = threads;

    std::uint64_t consolidations_before = graph.stats().consolidations;
    StreamResult stream = stream_updates(graph, log, 0, log.records.size(), threads);

    report.committed_txns = stream.committed;
    report.throughput_txn_per_sec =
        stream.seconds > 0 ? static_cast<double>(stream.committed) / stream.seconds : 0.0;
    report.abort_count = stream.aborted;
    report.consolidation_count = graph.stats().consolidations - consolidations_before;
    report.final_directed_edges = count_directed_edges(graph);
    report.verified = verify_end_state(graph, log);
    report.peak_memory_bytes = peak_rss_bytes();
    return report;
}

BenchReport run_mixed(Graph& graph, const UpdateLog& log, const MixedConfig& config) {
    BenchReport report;
    report.workload = config.kernel == Kernel::PageRank ? "mixed-pr" : "mixed-sssp";
    report.threads = config.threads;

    auto preload =
        static_cast<std::size_t>(static_cast<double>(log.records.size()) * config.preload_fraction);
    stream_updates(graph, log, 0, preload, config.threads);

    std::uint64_t consolidations_before = graph.stats().consolidations;
    std::atomic<bool> updates_done{false};
    std::atomic<std::uint64_t> kernel_runs{0};
    std::atomic<std::uint64_t> kernel_micros{0};

    std::thread analytics_driver([&] {
        vertex_t source = 1;  // generated logs make vertex 1 the hub
        do {
            ReadOnlyTransaction snapshot = graph.begin_ro();
            if (snapshot.vertex_count_snapshot() == 0) continue;
            auto k0 = Clock::now();
            if (config.kernel == Kernel::PageRank) {
                volatile double sink = pagerank(snapshot, 10, 0.85)[1];
                (void)sink;
            } else {
                vertex_t s = config.hotspot
                                 ? source
                                 : 1 + kernel_runs.load() % snapshot.vertex_count_snapshot();
                volatile double sink = sssp(snapshot, s, true)[1];
                (void)sink;
            }
            auto k1 = Clock::now();
            kernel_micros += static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::microseconds>(k1 - k0).count());
            ++kernel_runs;
        } while (!updates_done.load(std::memory_order_acquire));
    });

    StreamResult stream = stream_updates(graph, log, preload, log.records.size(), config.threads);
    updates_done.store(true, std::memory_order_release);
    analytics_driver.join();

    report.committed_txns = stream.committed;
    report.throughput_txn_per_sec =
        stream.seconds > 0 ? static_cast<double>(stream.committed) / stream.seconds : 0.0;
    report.abort_count = stream.aborted;
    report.analytics_runs = kernel_runs.load();
    report.analytics_latency_us =
        kernel_runs > 0 ? static_cast<double>(kernel_micros.load()) / kernel_runs : 0.0;
    report.consolidation_count = graph.stats().consolidations - consolidations_before;
    report.final_directed_edges = count_directed_edges(graph);
    report.verified = verify_end_state(graph, log);
    report.peak_memory_bytes = peak_rss_bytes();
    return report;
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::json j;
        j["workload"] = report.workload;
        j["threads"] = report.threads;
        j["committed_txns"] = report.committed_txns;
        j["throughput_txn_per_sec"] = report.throughput_txn_per_sec;
        j["analytics_latency_us"] = report.analytics_latency_us;
        j["analytics_runs"] = report.analytics_runs;
        j["abort_count"] = report.abort_count;
        j["consolidation_count"] = report.consolidation_count;
        j["peak_memory_bytes"] = report.peak_memory_bytes;
        j["final_directed_edges"] = report.final_directed_edges;
        j["verified"] = report.verified;
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "workload              " << report.workload << "\n"
        << "threads               " << report.threads << "\n"
        << "committed txns        " << report.committed_txns << "\n"
        << "throughput (txn/s)    " << report.throughput_txn_per_sec << "\n"
        << "analytics latency us  " << report.analytics_latency_us << "\n"
        << "analytics runs        " << report.analytics_runs << "\n"
        << "aborts                " << report.abort_count << "\n"
        << "consolidations        " << report.consolidation_count << "\n"
        << "peak memory bytes     " << report.peak_memory_bytes << "\n"
        << "final directed edges  " << report.final_directed_edges << "\n"
        << "verified              " << (report.verified ? "yes" : "no") << "\n";
    return out.str();
}

} // namespace deltagraph::bench
