#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "deltagraph/analytics.hpp"
#include "deltagraph/bench/harness.hpp"
#include "deltagraph/graph.hpp"
#include "oracle.hpp"

using namespace deltagraph;

namespace {

void add_undirected(Graph& g, vertex_t u, vertex_t v, double weight = 1.0) {
    Transaction t = g.begin_rw();
    std::string prop = bench::weight_property(weight);
    t.insert_edge(u, v, prop);
    t.insert_edge(v, u, prop);
    t.commit();
}

struct RandomGraph {
    std::vector<std::vector<vertex_t>> adj;                        // for ref_pagerank
    std::vector<std::vector<std::pair<vertex_t, double>>> weighted;  // for ref_dijkstra
};

RandomGraph load_random_graph(Graph& g, vertex_t n, double edge_prob, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RandomGraph out;
    out.adj.assign(n + 1, {});
    out.weighted.assign(n + 1, {});
    for (vertex_t v = 1; v <= n; ++v) g.ensure_vertex(v);
    for (vertex_t u = 1; u <= n; ++u) {
        for (vertex_t v = u + 1; v <= n; ++v) {
            if (unit(rng) < edge_prob) {
                double w = 0.5 + unit(rng);
                add_undirected(g, u, v, w);
                out.adj[u].push_back(v);
                out.adj[v].push_back(u);
                out.weighted[u].emplace_back(v, w);
                out.weighted[v].emplace_back(u, w);
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("snapshots register and see exactly their epoch") {
    Graph g{EngineConfig{}};
    {
        Transaction t = g.begin_rw();
        t.insert_edge(1, 2, "a");
        t.commit();
    }
    ReadOnlyTransaction ro = g.begin_ro();
    CHECK(ro.rts() == g.read_epoch());
    CHECK(ro.get_edge(1, 2).has_value());

    // updates after the snapshot stay invisible to it
    {
        Transaction t = g.begin_rw();
        t.delete_edge(1, 2);
        t.commit();
    }
    CHECK(ro.get_edge(1, 2).has_value());
    ReadOnlyTransaction later = g.begin_ro();
    CHECK(!later.get_edge(1, 2).has_value());

    Graph empty{EngineConfig{}};
    ReadOnlyTransaction none = empty.begin_ro();
    CHECK(none.vertex_count_snapshot() == 0);
}

TEST_CASE("pagerank fixed points") {
    SUBCASE("two vertices, one undirected edge: symmetric scores") {
        Graph g{EngineConfig{}};
        add_undirected(g, 1, 2);
        ReadOnlyTransaction ro = g.begin_ro();
        auto scores = pagerank(ro, 10, 0.85);
        CHECK(scores[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(scores[2] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("single isolated vertex gets the whole mass") {
        Graph g{EngineConfig{}};
        g.ensure_vertex(1);
        ReadOnlyTransaction ro = g.begin_ro();
        auto scores = pagerank(ro, 10, 0.85);
        CHECK(scores[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("5-vertex star matches the reference") {
        Graph g{EngineConfig{}};
        std::vector<std::vector<vertex_t>> adj(6);
        for (vertex_t leaf = 2; leaf <= 5; ++leaf) {
            add_undirected(g, 1, leaf);
            adj[1].push_back(leaf);
            adj[leaf].push_back(1);
        }
        ReadOnlyTransaction ro = g.begin_ro();
        auto scores = pagerank(ro, 10, 0.85);
        auto expect = oracle::ref_pagerank(adj, 10, 0.85);
        for (vertex_t v = 1; v <= 5; ++v) {
            CHECK(std::abs(scores[v] - expect[v]) < 1e-9);
        }
        double sum = 0;
        for (vertex_t v = 1; v <= 5; ++v) sum += scores[v];
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("pagerank matches the reference on random graphs") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Graph g{EngineConfig{}};
        RandomGraph rg = load_random_graph(g, 40, 0.15, seed);
        ReadOnlyTransaction ro = g.begin_ro();
        auto scores = pagerank(ro, 10, 0.85);
        auto expect = oracle::ref_pagerank(rg.adj, 10, 0.85);
        for (vertex_t v = 1; v <= 40; ++v) {
            CHECK(std::abs(scores[v] - expect[v]) < 1e-9);
        }
    }
}

TEST_CASE("sssp fixed points and reference equivalence") {
    SUBCASE("unit-weight path") {
        Graph g{EngineConfig{}};
        add_undirected(g, 1, 2);
        add_undirected(g, 2, 3);
        g.ensure_vertex(4);  // disconnected
        ReadOnlyTransaction ro = g.begin_ro();
        auto dist = sssp(ro, 1, false);
        CHECK(dist[1] == 0.0);
        CHECK(dist[2] == 1.0);
        CHECK(dist[3] == 2.0);
        CHECK(std::isinf(dist[4]));
    }
    SUBCASE("weighted random graph matches reference dijkstra") {
        for (std::uint64_t seed = 11; seed <= 13; ++seed) {
            Graph g{EngineConfig{}};
            RandomGraph rg = load_random_graph(g, 50, 0.1, seed);
            ReadOnlyTransaction ro = g.begin_ro();
            auto dist = sssp(ro, 1, true);
            auto expect = oracle::ref_dijkstra(rg.weighted, 1);
            for (vertex_t v = 1; v <= 50; ++v) {
                if (std::isinf(expect[v])) {
                    CHECK(std::isinf(dist[v]));
                } else {
                    CHECK(std::abs(dist[v] - expect[v]) < 1e-9);
                }
            }
        }
    }
    SUBCASE("negative weights are rejected") {
        Graph g{EngineConfig{}};
        add_undirected(g, 1, 2, -1.0);
        ReadOnlyTransaction ro = g.begin_ro();
        CHECK_THROWS_AS((void)sssp(ro, 1, true), NegativeWeightError);
        // hop-count mode ignores the property
        auto dist = sssp(ro, 1, false);
        CHECK(dist[2] == 1.0);
    }
}

TEST_CASE("snapshot stability: identical results during a writer storm") {
    Graph g{EngineConfig{}};
    RandomGraph rg = load_random_graph(g, 30, 0.2, 99);

    std::atomic<bool> stop{false};
    std::thread storm([&g, &stop] {
        std::mt19937_64 rng(5);
        while (!stop.load()) {
            Transaction t = g.begin_rw();
            vertex_t u = 1 + rng() % 30;
            vertex_t v = 1 + rng() % 30;
            if (u != v) {
                if (t.insert_edge(u, v, bench::weight_property(1.0)) !=
                    EdgeUpsertResult::Conflict) {
                    t.commit();
                    continue;
                }
            } else {
                t.abort();
            }
        }
    });

    ReadOnlyTransaction ro = g.begin_ro();
    auto first = pagerank(ro, 10, 0.85);
    auto ref = oracle::ref_pagerank(rg.adj, 10, 0.85);
    for (int run = 0; run < 5; ++run) {
        auto again = pagerank(ro, 10, 0.85, 1 + run % 3);
        CHECK(again == first);  // bitwise stable per snapshot
    }
    for (vertex_t v = 1; v <= 30; ++v) {
        CHECK(std::abs(first[v] - ref[v]) < 1e-9);
    }
    stop.store(true);
    storm.join();
}

TEST_CASE("analytics parallelism is deterministic across thread counts") {
    Graph g{EngineConfig{}};
    load_random_graph(g, 300, 0.02, 7);
    ReadOnlyTransaction ro = g.begin_ro();
    auto one = pagerank(ro, 10, 0.85, 1);
    auto two = pagerank(ro, 10, 0.85, 2);
    auto four = pagerank(ro, 10, 0.85, 4);
    CHECK(one == two);
    CHECK(two == four);
}
