#include "memjoin/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace memjoin {

using nlohmann::json;

void ExperimentConfig::apply_scale(double factor) {
    if (!(factor > 0)) throw std::invalid_argument("scale factor must be positive");
    if (factor == 1.0) return;
    for (RelationStats& r : query.relations)
        r.cardinality = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::llround(r.cardinality * factor)));
    if (query.sizing.policy == TableSizing::Policy::FixedCount)
        query.sizing.fixed_count = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::llround(query.sizing.fixed_count * factor)));
}

ExperimentConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.label = j.value("label", "");

    if (!j.contains("relations") || !j["relations"].is_array() || j["relations"].size() < 2)
        throw std::invalid_argument("config needs a 'relations' array of at least two entries");
    for (const json& r : j["relations"]) {
        RelationStats stats;
        if (r.is_number()) {
            stats.cardinality = r.get<std::uint64_t>();
        } else {
            stats.cardinality = r.at("cardinality").get<std::uint64_t>();
            stats.tuple_width = r.value("tuple_width", std::uint64_t{16});
        }
        cfg.query.relations.push_back(stats);
    }

    const std::size_t edges = cfg.query.relations.size() - 1;
    if (j.contains("joins")) {
        for (const json& e : j["joins"]) {
            JoinSpec spec;
            spec.match_probability = e.value("match_probability", 1.0);
            spec.fanout = e.value("fanout", 1.0);
            spec.zipf_factor = e.value("zipf_factor", 0.0);
            cfg.query.joins.push_back(spec);
        }
        if (cfg.query.joins.size() == 1 && edges > 1)
            cfg.query.joins.resize(edges, cfg.query.joins[0]);  // one spec fans out to all edges
    } else {
        cfg.query.joins.resize(edges);
    }

    cfg.query.intermediate_width = j.value("intermediate_width", std::uint64_t{16});
    cfg.query.sizing.header_bytes = j.value("bucket_header_bytes", std::uint64_t{16});

    if (j.contains("bucket_sizing")) {
        const json& s = j["bucket_sizing"];
        if (s.is_string()) {
            const std::string name = s.get<std::string>();
            if (name == "pow2")
                cfg.query.sizing.policy = TableSizing::Policy::Pow2AtLeastCard;
            else if (name == "exact")
                cfg.query.sizing.policy = TableSizing::Policy::ExactCard;
            else
                throw std::invalid_argument("bucket_sizing: unknown policy " + name);
        } else if (s.is_number()) {
            cfg.query.sizing.policy = TableSizing::Policy::FixedCount;
            cfg.query.sizing.fixed_count = s.get<std::uint64_t>();
        } else if (s.is_object() && s.contains("load_factor")) {
            cfg.query.sizing.policy = TableSizing::Policy::CardOverLoad;
            cfg.query.sizing.load_factor = s["load_factor"].get<double>();
        } else {
            throw std::invalid_argument("bucket_sizing: expected name, count or load_factor");
        }
    }

    const std::string hash = j.value("hash", "mix");
    if (hash == "mix")
        cfg.hash = HashMode::Multiplicative;
    else if (hash == "identity")
        cfg.hash = HashMode::IdentityMod;
    else
        throw std::invalid_argument("hash: expected 'mix' or 'identity'");

    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.workers = j.value("workers", 0u);
    cfg.repetitions = j.value("repetitions", 10);
    cfg.batch_size = j.value("batch_size", 1024u);
    cfg.prefetch = j.value("prefetch", false);
    cfg.cache_line_bytes = j.value("cache_line_bytes", std::uint64_t{0});

    cfg.query.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

}  // namespace memjoin
