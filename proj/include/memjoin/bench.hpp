#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "memjoin/types.hpp"

namespace memjoin {

/// Configuration of the calibration microbenchmarks. `array_bytes` is the
/// per-worker array size and must be a power of two; the total allocation has
/// to stay below physical memory so that no paging occurs.
struct BenchConfig {
    unsigned worker_count = 0;          // 0 = MEMJOIN_WORKERS env, else hardware concurrency
    std::uint64_t array_bytes = 1ull << 26;
    int repetitions = 10;
    std::uint64_t seed = 1;

    unsigned resolved_workers() const;
    void validate() const;  // throws std::invalid_argument
};

struct BenchResult {
    AccessPattern pattern;
    double elapsed_seconds = 0;       // mean over repetitions
    std::uint64_t lines_accessed = 0; // per repetition, summed over workers

    double cost_per_line() const { return elapsed_seconds / static_cast<double>(lines_accessed); }
};

/// Run one of the four microbenchmarks. sr/sw scan per-worker private
/// arrays; rr/rw touch one shared array at pre-shuffled line-aligned
/// offsets, each worker covering its own stripe exactly once per repetition.
/// Timing brackets the barrier-delimited region and excludes setup.
/// Throws std::runtime_error on allocation failure or degenerate timing.
BenchResult run_pattern(AccessPattern p, const BenchConfig& cfg, std::uint64_t cache_line);

/// Normalize four per-line costs into a WeightVector with w_sr == 1.
/// Throws if a pattern is missing or duplicated.
WeightVector derive_weights(const std::vector<BenchResult>& results);

/// Sanity notes about a weight vector (rw not the maximum, sr not the
/// minimum). These are warnings, not errors: unusual hardware is allowed.
std::vector<std::string> weight_warnings(const WeightVector& w);

/// Cache-line size of this host, from sysconf when available, else 64.
std::uint64_t detect_cache_line_bytes();

/// Run all four microbenchmarks and assemble a MachineProfile.
MachineProfile bootstrap_profile(const BenchConfig& cfg, const std::string& label);

/// The shuffled visit order a rand-pattern worker uses over its stripe of
/// the shared array. Exposed for the coverage/adjacency property tests.
std::vector<std::uint64_t> worker_offset_sequence(std::uint64_t stripe_lines,
                                                  std::uint64_t stripe_base,
                                                  std::uint64_t seed);

}  // namespace memjoin
