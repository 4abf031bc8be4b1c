#pragma once

#include <cstdint>
#include <string>

#include "memjoin/executor.hpp"
#include "memjoin/plan_space.hpp"

namespace memjoin {

/// One experiment: a chain query plus generation and execution knobs.
/// Loaded from a JSON document; see README for the schema.
struct ExperimentConfig {
    std::string label;
    ChainQuery query;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    int repetitions = 10;
    std::uint32_t batch_size = 1024;
    bool prefetch = false;
    HashMode hash = HashMode::Multiplicative;
    std::uint64_t cache_line_bytes = 0;  // 0 = take it from the profile / host

    /// Shrink every cardinality (and any fixed bucket count) by `factor`,
    /// preserving ratios. factor must be positive.
    void apply_scale(double factor);

    ExecOptions exec_options() const {
        return ExecOptions{workers, batch_size, prefetch, hash};
    }
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace memjoin
