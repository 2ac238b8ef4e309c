#include "deltagraph/bench/log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace deltagraph::bench {

namespace {

vertex_t remap_id(UpdateLog& log, std::uint64_t raw) {
    auto [it, inserted] = log.remap.try_emplace(raw, log.max_vertex + 1);
    if (inserted) ++log.max_vertex;
    return it->second;
}

// bounded Zipf over ranks 1..n via an inverse-CDF table
class ZipfSampler {
public:
    ZipfSampler(vertex_t n, double alpha) : cdf_(n) {
        double sum = 0.0;
        for (vertex_t k = 1; k <= n; ++k) {
            sum += 1.0 / std::pow(static_cast<double>(k), alpha);
            cdf_[k - 1] = sum;
        }
        for (auto& c : cdf_) c /= sum;
    }

    template <typename Rng>
    vertex_t operator()(Rng& rng) {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<vertex_t>(it - cdf_.begin()) + 1;
    }

private:
    std::vector<double> cdf_;
};

} // namespace

UpdateLog load_edge_list(const std::string& path, LoadMode mode, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    UpdateLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        UpdateRecord rec{UpdateOp::Insert, 0, 0, 1.0};
        std::string first;
        fields >> first;
        if (first == "D" || first == "d") {
            rec.op = UpdateOp::Delete;
            fields >> first;
        } else if (first == "I" || first == "i") {
            fields >> first;
        }
        std::uint64_t raw_src = 0;
        std::uint64_t raw_dst = 0;
        try {
            raw_src = std::stoull(first);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad source id");
        }
        if (!(fields >> raw_dst)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing destination");
        }
        double weight = 1.0;
        fields >> weight;  // optional
        rec.src = remap_id(log, raw_src);
        rec.dst = remap_id(log, raw_dst);
        rec.weight = weight;
        log.records.push_back(rec);
    }
    if (mode == LoadMode::Shuffled) shuffle_log(log, seed);
    return log;
}

void shuffle_log(UpdateLog& log, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::shuffle(log.records.begin(), log.records.end(), rng);
}

UpdateLog generate_log(const GeneratorConfig& config) {
    std::mt19937_64 rng(config.seed);
    ZipfSampler zipf(config.vertices, config.zipf_alpha);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    UpdateLog log;
    log.max_vertex = config.vertices;
    log.records.reserve(config.edges + static_cast<std::size_t>(config.edges * config.delete_ratio));
    for (std::uint64_t i = 0; i < config.edges; ++i) {
        vertex_t src = zipf(rng);
        vertex_t dst = zipf(rng);
        while (dst == src) dst = zipf(rng);
        log.records.push_back({UpdateOp::Insert, src, dst, 1.0 + unit(rng)});
    }
    // deletes target a random earlier insert and are appended afterwards, so
    // every delete follows its insert even after source grouping
    std::size_t insert_count = log.records.size();
    auto deletes = static_cast<std::size_t>(static_cast<double>(insert_count) * config.delete_ratio);
    for (std::size_t i = 0; i < deletes; ++i) {
        const UpdateRecord& target =
            log.records[std::uniform_int_distribution<std::size_t>(0, insert_count - 1)(rng)];
        log.records.push_back({UpdateOp::Delete, target.src, target.dst, 0.0});
    }
    // temporal locality: group by source neighborhood, keep relative order
    std::stable_sort(log.records.begin(), log.records.end(),
                     [](const UpdateRecord& a, const UpdateRecord& b) { return a.src < b.src; });
    return log;
}

void write_log(const UpdateLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output: " + path);
    out << "# deltagraph update log: [D] src dst [weight]\n";
    for (const UpdateRecord& rec : log.records) {
        if (rec.op == UpdateOp::Delete) {
            out << "D " << rec.src << ' ' << rec.dst << '\n';
        } else {
            out << rec.src << ' ' << rec.dst << ' ' << rec.weight << '\n';
        }
    }
}

} // namespace deltagraph::bench
