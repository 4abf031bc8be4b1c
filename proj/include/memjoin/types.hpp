#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace memjoin {

/// The four cache-line access patterns the cost model distinguishes.
/// The enumerator order (sr < rr < sw < rw) is load-bearing: serialization
/// and result tables rely on it.
enum class AccessPattern : int {
    SeqRead   = 0,
    RandRead  = 1,
    SeqWrite  = 2,
    RandWrite = 3,
};

constexpr std::array<AccessPattern, 4> kAllPatterns = {
    AccessPattern::SeqRead, AccessPattern::RandRead,
    AccessPattern::SeqWrite, AccessPattern::RandWrite};

const char* pattern_mnemonic(AccessPattern p);  // "sr", "rr", "sw", "rw"

/// Per-pattern cost weights of one machine, normalized so that w_sr == 1.
struct WeightVector {
    double sr = 1.0;
    double rr = 1.0;
    double sw = 1.0;
    double rw = 1.0;

    /// Rescale so that sr == 1. Throws if any weight is not positive.
    WeightVector normalized() const;
    bool valid() const { return sr > 0 && rr > 0 && sw > 0 && rw > 0; }
    double operator[](AccessPattern p) const;
};

/// Event counts per access pattern, in units of one cache line each.
struct AccessCounts {
    std::uint64_t sr = 0;
    std::uint64_t rr = 0;
    std::uint64_t sw = 0;
    std::uint64_t rw = 0;

    AccessCounts& operator+=(const AccessCounts& o) {
        sr += o.sr;
        rr += o.rr;
        sw += o.sw;
        rw += o.rw;
        return *this;
    }
    friend AccessCounts operator+(AccessCounts a, const AccessCounts& b) { return a += b; }
    bool operator==(const AccessCounts&) const = default;

    std::uint64_t total() const { return sr + rr + sw + rw; }
    /// Writes always read the line first (read-for-ownership), so the
    /// observable read total includes sw and rw events.
    std::uint64_t total_reads() const { return sr + rr + sw + rw; }
    std::uint64_t total_writes() const { return sw + rw; }
};

/// Cardinality and fixed tuple width of a relation or intermediate stream.
struct RelationStats {
    std::uint64_t cardinality = 0;
    std::uint64_t tuple_width = 16;  // bytes

    bool operator==(const RelationStats&) const = default;
};

/// Geometry of one hash table: a contiguous array of `bucket_count` buckets,
/// each holding `header_bytes` of metadata followed by `tuples_per_bucket`
/// fixed-width slots.
struct HashTableSpec {
    std::uint64_t bucket_count = 1;
    std::uint64_t header_bytes = 16;
    std::uint64_t tuples_per_bucket = 0;  // ceil(cardinality / bucket_count)
    std::uint64_t tuple_width = 16;
    std::uint64_t bucket_bytes = 16;      // header_bytes + tuples_per_bucket * tuple_width

    /// Derive a consistent spec for a build input of `cardinality` tuples.
    static HashTableSpec sized_for(std::uint64_t cardinality, std::uint64_t bucket_count,
                                   std::uint64_t header_bytes, std::uint64_t tuple_width);

    /// Check the structural invariants against the build input they describe.
    bool consistent_with(const RelationStats& build_input) const;
};

/// Selects how the sequential-write term of the build phase is computed.
/// TableConsistent counts write events only for the tuples placed past the
/// bucket's first cache line (the first line is already paid for by the
/// latch's rw access). LiteralEq7 charges the full packing formula to every
/// tuple in the bucket. The two differ once buckets span multiple lines;
/// TableConsistent is the default.
enum class SwMode {
    TableConsistent,
    LiteralEq7,
};

/// Calibrated description of one host: cache-line size, the weight vector
/// measured by the bootstrap microbenchmarks, and enough metadata to
/// reproduce the calibration.
struct MachineProfile {
    std::string label;
    std::uint64_t cache_line_bytes = 64;
    WeightVector weights;

    // Bootstrap provenance.
    unsigned worker_count = 0;
    std::uint64_t array_bytes = 0;  // per-worker array size used by the benchmarks
    int repetitions = 0;
    std::uint64_t seed = 0;
    std::string placement_policy = "first-touch";
    std::array<double, 4> raw_ns_per_line{};  // unnormalized costs, sr rr sw rw

    bool valid() const {
        return cache_line_bytes >= 16 &&
               (cache_line_bytes & (cache_line_bytes - 1)) == 0 && weights.valid();
    }
};

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return b == 0 ? 0 : (a + b - 1) / b;
}

}  // namespace memjoin
