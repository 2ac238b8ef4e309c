#include "deltagraph/analytics.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <queue>
#include <thread>

namespace deltagraph {

namespace {

struct SnapshotAdjacency {
    // flattened adjacency: neighbors[offsets[v] .. offsets[v+1])
    std::vector<std::size_t> offsets;
    std::vector<vertex_t> neighbors;
    std::vector<double> weights;

    std::size_t degree(vertex_t v) const { return offsets[v + 1] - offsets[v]; }
};

SnapshotAdjacency materialize(const ReadOnlyTransaction& snapshot, bool with_weights,
                              bool check_negative) {
    vertex_t n = snapshot.vertex_count_snapshot();
    SnapshotAdjacency adj;
    adj.offsets.assign(n + 2, 0);
    for (vertex_t v = 1; v <= n; ++v) {
        std::size_t count = 0;
        snapshot.scan_adjacency(v, [&](vertex_t, std::string_view) { ++count; });
        adj.offsets[v + 1] = adj.offsets[v] + count;
    }
    adj.neighbors.resize(adj.offsets[n + 1]);
    if (with_weights) adj.weights.resize(adj.offsets[n + 1]);
    for (vertex_t v = 1; v <= n; ++v) {
        std::size_t cursor = adj.offsets[v];
        snapshot.scan_adjacency(v, [&](vertex_t dst, std::string_view prop) {
            adj.neighbors[cursor] = dst;
            if (with_weights) {
                double w = 1.0;
                if (prop.size() >= sizeof(double)) {
                    std::memcpy(&w, prop.data(), sizeof(double));
                }
                if (check_negative && w < 0.0) {
                    throw NegativeWeightError("negative edge weight in sssp");
                }
                adj.weights[cursor] = w;
            }
            ++cursor;
        });
    }
    return adj;
}

template <typename Fn>
void parallel_for_vertices(vertex_t n, std::uint32_t threads, Fn&& fn) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 256) {
        fn(vertex_t{1}, n + 1);
        return;
    }
    std::vector<std::thread> pool;
    vertex_t chunk = (n + threads - 1) / threads;
    for (std::uint32_t t = 0; t < threads; ++t) {
        vertex_t begin = 1 + t * chunk;
        vertex_t end = std::min<vertex_t>(begin + chunk, n + 1);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

} // namespace

std::vector<double> pagerank(const ReadOnlyTransaction& snapshot, std::uint32_t iterations,
                             double damping, std::uint32_t threads) {
    vertex_t n = snapshot.vertex_count_snapshot();
    std::vector<double> scores(n + 1, 0.0);
    if (n == 0) return scores;
    SnapshotAdjacency adj = materialize(snapshot, /*with_weights=*/false, /*check_negative=*/false);

    std::vector<double> current(n + 1, 1.0 / static_cast<double>(n));
    std::vector<double> next(n + 1, 0.0);
    for (std::uint32_t iter = 0; iter < iterations; ++iter) {
        // sequential dangling reduction keeps the result bitwise deterministic
        double dangling = 0.0;
        for (vertex_t v = 1; v <= n; ++v) {
            if (adj.degree(v) == 0) dangling += current[v];
        }
        double base = (1.0 - damping) / static_cast<double>(n) +
                      damping * dangling / static_cast<double>(n);
        parallel_for_vertices(n, threads, [&](vertex_t begin, vertex_t end) {
            for (vertex_t v = begin; v < end; ++v) {
                double sum = 0.0;
                for (std::size_t i = adj.offsets[v]; i < adj.offsets[v + 1]; ++i) {
                    vertex_t u = adj.neighbors[i];
                    sum += current[u] / static_cast<double>(adj.degree(u));
                }
                next[v] = base + damping * sum;
            }
        });
        std::swap(current, next);
    }

    double total = 0.0;
    for (vertex_t v = 1; v <= n; ++v) total += current[v];
    for (vertex_t v = 1; v <= n; ++v) scores[v] = current[v] / total;
    return scores;
}

std::vector<double> sssp(const ReadOnlyTransaction& snapshot, vertex_t source, bool use_weights) {
    vertex_t n = snapshot.vertex_count_snapshot();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n + 1, kInf);
    if (source == 0 || source > n) return dist;
    SnapshotAdjacency adj = materialize(snapshot, use_weights, use_weights);

    using Item = std::pair<double, vertex_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (std::size_t i = adj.offsets[v]; i < adj.offsets[v + 1]; ++i) {
            vertex_t u = adj.neighbors[i];
            double w = use_weights ? adj.weights[i] : 1.0;
            double nd = d + w;
            if (nd < dist[u]) {
                dist[u] = nd;
                heap.emplace(nd, u);
            }
        }
    }
    return dist;
}

} // namespace deltagraph
