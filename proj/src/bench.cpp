#include "memjoin/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <memory>
#include <new>
#include <stdexcept>
#include <thread>

#include "memjoin/rng.hpp"

namespace memjoin {

namespace {

// Keep the optimizer from discarding benchmark loads/stores.
inline void keep(std::uint64_t& v) { asm volatile("" : "+r"(v)::"memory"); }

using Clock = std::chrono::steady_clock;

constexpr double kMinMeasurableSeconds = 1e-6;

struct TimedRegion {
    double seconds_sum = 0;
};

}  // namespace

unsigned BenchConfig::resolved_workers() const {
    if (worker_count != 0) return worker_count;
    if (const char* env = std::getenv("MEMJOIN_WORKERS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void BenchConfig::validate() const {
    if (array_bytes < (1ull << 16) || (array_bytes & (array_bytes - 1)) != 0)
        throw std::invalid_argument("array_bytes must be a power of two >= 64 KiB");
    if (repetitions < 10) throw std::invalid_argument("repetitions must be >= 10");
}

std::uint64_t detect_cache_line_bytes() {
#ifdef _SC_LEVEL1_DCACHE_LINESIZE
    const long sz = ::sysconf(_SC_LEVEL1_DCACHE_LINESIZE);
    if (sz >= 16 && (sz & (sz - 1)) == 0) return static_cast<std::uint64_t>(sz);
#endif
    return 64;
}

std::vector<std::uint64_t> worker_offset_sequence(std::uint64_t stripe_lines,
                                                  std::uint64_t stripe_base,
                                                  std::uint64_t seed) {
    std::vector<std::uint64_t> offsets(stripe_lines);
    for (std::uint64_t i = 0; i < stripe_lines; ++i) offsets[i] = stripe_base + i;
    Xorshift128 rng(seed);
    shuffle_in_place(offsets.data(), offsets.size(), rng);
    return offsets;
}

namespace {

void fill_random(std::uint64_t* data, std::uint64_t words, std::uint64_t seed) {
    Xorshift128 rng(seed);
    for (std::uint64_t i = 0; i < words; ++i) data[i] = rng.next();
}

double run_timed_repetitions(unsigned workers, int reps,
                             const std::vector<std::function<void()>>& worker_fns) {
    std::barrier sync(static_cast<std::ptrdiff_t>(workers) + 1);
    std::vector<std::thread> team;
    team.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        team.emplace_back([&, w] {
            for (int r = 0; r < reps; ++r) {
                sync.arrive_and_wait();  // start line
                worker_fns[w]();
                sync.arrive_and_wait();  // finish line
            }
        });
    }
    double total = 0;
    for (int r = 0; r < reps; ++r) {
        sync.arrive_and_wait();
        const auto t0 = Clock::now();
        sync.arrive_and_wait();
        const auto t1 = Clock::now();
        total += std::chrono::duration<double>(t1 - t0).count();
    }
    for (std::thread& t : team) t.join();
    return total / reps;
}

}  // namespace

BenchResult run_pattern(AccessPattern p, const BenchConfig& cfg, std::uint64_t cache_line) {
    cfg.validate();
    const unsigned workers = cfg.resolved_workers();
    const std::uint64_t words_per_worker = cfg.array_bytes / 8;
    const bool sequential = p == AccessPattern::SeqRead || p == AccessPattern::SeqWrite;
    const bool writes = p == AccessPattern::SeqWrite || p == AccessPattern::RandWrite;
    const std::uint64_t line_words = cache_line / 8;

    std::vector<std::function<void()>> fns(workers);
    // Released after the run; keeps every per-worker allocation alive.
    std::vector<std::unique_ptr<std::uint64_t[]>> private_arrays;
    std::unique_ptr<std::uint64_t[]> shared_array;
    std::vector<std::vector<std::uint64_t>> offsets(workers);
    std::uint64_t lines_accessed = 0;

    try {
        if (sequential) {
            private_arrays.resize(workers);
            std::vector<std::thread> setup;
            for (unsigned w = 0; w < workers; ++w) {
                private_arrays[w] = std::make_unique<std::uint64_t[]>(words_per_worker);
                // First-touch fill by the owning worker: the portable stand-in
                // for NUMA-local placement.
                setup.emplace_back([&, w] {
                    fill_random(private_arrays[w].get(), words_per_worker,
                                cfg.seed + 0x1000 + w);
                });
            }
            for (std::thread& t : setup) t.join();
            lines_accessed = workers * (cfg.array_bytes / cache_line);
            for (unsigned w = 0; w < workers; ++w) {
                std::uint64_t* arr = private_arrays[w].get();
                if (writes) {
                    fns[w] = [arr, words_per_worker] {
                        std::uint64_t acc = 0;
                        for (std::uint64_t i = 0; i < words_per_worker; ++i) {
                            acc += arr[i];
                            arr[i] = acc;
                        }
                        keep(acc);
                    };
                } else {
                    fns[w] = [arr, words_per_worker] {
                        std::uint64_t acc = 0;
                        for (std::uint64_t i = 0; i < words_per_worker; ++i) acc += arr[i];
                        keep(acc);
                    };
                }
            }
        } else {
            const std::uint64_t total_words = words_per_worker * workers;
            const std::uint64_t total_lines = total_words * 8 / cache_line;
            shared_array = std::make_unique<std::uint64_t[]>(total_words);
            fill_random(shared_array.get(), total_words, cfg.seed + 0x2000);
            const std::uint64_t quota = total_lines / workers;
            if (quota == 0) throw std::runtime_error("array too small for worker count");
            for (unsigned w = 0; w < workers; ++w)
                offsets[w] = worker_offset_sequence(quota, quota * w, cfg.seed + 0x3000 + w);
            lines_accessed = quota * workers;
            for (unsigned w = 0; w < workers; ++w) {
                std::uint64_t* arr = shared_array.get();
                const std::vector<std::uint64_t>& offs = offsets[w];
                if (writes) {
                    fns[w] = [arr, &offs, line_words] {
                        std::uint64_t acc = 0;
                        for (const std::uint64_t line : offs) {
                            std::uint64_t* p = arr + line * line_words;
                            for (std::uint64_t k = 0; k < line_words; ++k) {
                                const std::uint64_t v = p[k];
                                acc += v;
                                p[k] = v + 1;
                            }
                        }
                        keep(acc);
                    };
                } else {
                    fns[w] = [arr, &offs, line_words] {
                        std::uint64_t acc = 0;
                        for (const std::uint64_t line : offs) {
                            const std::uint64_t* p = arr + line * line_words;
                            for (std::uint64_t k = 0; k < line_words; ++k) acc += p[k];
                        }
                        keep(acc);
                    };
                }
            }
        }
    } catch (const std::bad_alloc&) {
        throw std::runtime_error("benchmark allocation failed; lower array_bytes or workers");
    }

    const double elapsed = run_timed_repetitions(workers, cfg.repetitions, fns);
    if (elapsed < kMinMeasurableSeconds)
        throw std::runtime_error(
            std::string("degenerate timing for ") + pattern_mnemonic(p) +
            ": elapsed below clock resolution; raise array_bytes");
    return BenchResult{p, elapsed, lines_accessed};
}

WeightVector derive_weights(const std::vector<BenchResult>& results) {
    std::array<double, 4> cost{};
    std::array<bool, 4> seen{};
    for (const BenchResult& r : results) {
        const int idx = static_cast<int>(r.pattern);
        if (seen[idx]) throw std::invalid_argument("duplicate pattern result");
        seen[idx] = true;
        cost[idx] = r.cost_per_line();
    }
    for (int i = 0; i < 4; ++i)
        if (!seen[i])
            throw std::invalid_argument(std::string("missing pattern result: ") +
                                        pattern_mnemonic(static_cast<AccessPattern>(i)));
    return WeightVector{cost[0], cost[1], cost[2], cost[3]}.normalized();
}

std::vector<std::string> weight_warnings(const WeightVector& w) {
    std::vector<std::string> notes;
    const double mx = std::max(std::max(w.sr, w.rr), std::max(w.sw, w.rw));
    const double mn = std::min(std::min(w.sr, w.rr), std::min(w.sw, w.rw));
    if (w.rw < mx) notes.push_back("w_rw is not the largest weight");
    if (w.sr > mn) notes.push_back("w_sr is not the smallest weight");
    return notes;
}

MachineProfile bootstrap_profile(const BenchConfig& cfg, const std::string& label) {
    const std::uint64_t cl = detect_cache_line_bytes();
    std::vector<BenchResult> results;
    results.reserve(4);
    for (AccessPattern p : kAllPatterns) results.push_back(run_pattern(p, cfg, cl));

    MachineProfile prof;
    prof.label = label;
    prof.cache_line_bytes = cl;
    prof.weights = derive_weights(results);
    prof.worker_count = cfg.resolved_workers();
    prof.array_bytes = cfg.array_bytes;
    prof.repetitions = cfg.repetitions;
    prof.seed = cfg.seed;
    for (const BenchResult& r : results)
        prof.raw_ns_per_line[static_cast<int>(r.pattern)] = r.cost_per_line() * 1e9;
    return prof;
}

}  // namespace memjoin
