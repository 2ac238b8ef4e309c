#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deltagraph/bench/harness.hpp"
#include "deltagraph/bench/log.hpp"
#include "deltagraph/graph.hpp"

namespace db = deltagraph::bench;

namespace {

db::LoadMode parse_mode(const std::string& mode) {
    return mode == "ordered" ? db::LoadMode::Ordered : db::LoadMode::Shuffled;
}

int finish(const db::BenchReport& report, const std::string& format) {
    std::cout << db::emit_report(report,
                                 format == "json" ? db::ReportFormat::Json : db::ReportFormat::Human);
    if (!report.verified) {
        std::cerr << "verification failed: engine state does not match sequential replay\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deltagraph benchmark harness"};
    app.require_subcommand(1);

    // construct
    auto* construct = app.add_subcommand("construct", "build a graph from an update log");
    std::string c_input;
    std::string c_mode = "shuffled";
    std::string c_report = "human";
    std::uint32_t c_threads = 4;
    std::uint64_t c_seed = 42;
    construct->add_option("--input", c_input, "edge list / update log path")->required();
    construct->add_option("--mode", c_mode, "shuffled|ordered")
        ->check(CLI::IsMember({"shuffled", "ordered"}));
    construct->add_option("--threads", c_threads, "update worker threads");
    construct->add_option("--seed", c_seed, "shuffle seed");
    construct->add_option("--report", c_report, "human|json")->check(CLI::IsMember({"human", "json"}));

    // mixed
    auto* mixed = app.add_subcommand("mixed", "stream updates while running analytics");
    std::string m_input;
    std::string m_mode = "shuffled";
    std::string m_kernel = "pr";
    std::string m_report = "human";
    std::uint32_t m_threads = 4;
    std::uint64_t m_seed = 42;
    bool m_hotspot = false;
    double m_preload = 0.8;
    mixed->add_option("--input", m_input, "update log path")->required();
    mixed->add_option("--mode", m_mode, "shuffled|ordered")
        ->check(CLI::IsMember({"shuffled", "ordered"}));
    mixed->add_option("--threads", m_threads, "update worker threads");
    mixed->add_option("--kernel", m_kernel, "pr|sssp")->check(CLI::IsMember({"pr", "sssp"}));
    mixed->add_flag("--hotspot", m_hotspot, "aim the kernel at the hub vertex");
    mixed->add_option("--preload-fraction", m_preload, "log prefix applied before timing");
    mixed->add_option("--seed", m_seed, "shuffle seed");
    mixed->add_option("--report", m_report, "human|json")->check(CLI::IsMember({"human", "json"}));

    // gen-log
    auto* gen = app.add_subcommand("gen-log", "generate a synthetic power-law update log");
    db::GeneratorConfig gen_config;
    std::string g_out;
    gen->add_option("--vertices", gen_config.vertices, "vertex count");
    gen->add_option("--edges", gen_config.edges, "insert record count");
    gen->add_option("--zipf", gen_config.zipf_alpha, "zipf exponent");
    gen->add_option("--delete-ratio", gen_config.delete_ratio, "fraction of inserts later deleted");
    gen->add_option("--seed", gen_config.seed, "generator seed");
    gen->add_option("--out", g_out, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*construct) {
            db::UpdateLog log = db::load_edge_list(c_input, parse_mode(c_mode), c_seed);
            deltagraph::Graph graph(db::config_from_env({}));
            return finish(db::run_construction(graph, log, c_threads), c_report);
        }
        if (*mixed) {
            db::UpdateLog log = db::load_edge_list(m_input, parse_mode(m_mode), m_seed);
            db::MixedConfig config;
            config.threads = m_threads;
            config.kernel = m_kernel == "sssp" ? db::Kernel::Sssp : db::Kernel::PageRank;
            config.hotspot = m_hotspot;
            config.preload_fraction = m_preload;
            deltagraph::Graph graph(db::config_from_env({}));
            return finish(db::run_mixed(graph, log, config), m_report);
        }
        if (*gen) {
            db::write_log(db::generate_log(gen_config), g_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
