#include "memjoin/model.hpp"

#include <numeric>
#include <stdexcept>

namespace memjoin {

const char* pattern_mnemonic(AccessPattern p) {
    switch (p) {
        case AccessPattern::SeqRead: return "sr";
        case AccessPattern::RandRead: return "rr";
        case AccessPattern::SeqWrite: return "sw";
        case AccessPattern::RandWrite: return "rw";
    }
    return "?";
}

WeightVector WeightVector::normalized() const {
    if (!valid()) throw std::invalid_argument("weights must be positive");
    return WeightVector{1.0, rr / sr, sw / sr, rw / sr};
}

double WeightVector::operator[](AccessPattern p) const {
    switch (p) {
        case AccessPattern::SeqRead: return sr;
        case AccessPattern::RandRead: return rr;
        case AccessPattern::SeqWrite: return sw;
        case AccessPattern::RandWrite: return rw;
    }
    return 0.0;
}

HashTableSpec HashTableSpec::sized_for(std::uint64_t cardinality, std::uint64_t bucket_count,
                                       std::uint64_t header_bytes, std::uint64_t tuple_width) {
    if (bucket_count == 0) throw std::invalid_argument("bucket_count must be >= 1");
    if (tuple_width == 0) throw std::invalid_argument("tuple_width must be >= 1");
    HashTableSpec s;
    s.bucket_count = bucket_count;
    s.header_bytes = header_bytes;
    s.tuples_per_bucket = ceil_div(cardinality, bucket_count);
    s.tuple_width = tuple_width;
    s.bucket_bytes = header_bytes + s.tuples_per_bucket * tuple_width;
    return s;
}

bool HashTableSpec::consistent_with(const RelationStats& build_input) const {
    return bucket_count >= 1 && tuple_width >= 1 &&
           tuples_per_bucket == ceil_div(build_input.cardinality, bucket_count) &&
           bucket_bytes == header_bytes + tuples_per_bucket * tuple_width;
}

AccessCounts scan_counts(const RelationStats& rel, std::uint64_t cache_line) {
    AccessCounts c;
    c.sr = ceil_div(rel.cardinality * rel.tuple_width, cache_line);
    return c;
}

std::uint64_t bucket_write_events(std::uint64_t tuples, std::uint64_t tuple_width,
                                  std::uint64_t cache_line) {
    if (tuples == 0) return 0;
    const std::uint64_t span = tuples * tuple_width - 1;
    const std::uint64_t common = std::lcm(tuple_width, cache_line);
    return tuples + span / cache_line - span / common;
}

namespace {

/// Number of tuples in a bucket that count toward the sw term under `mode`.
/// TableConsistent drops the tuples whose slot begins within the header's
/// cache line; their writes land on the line the latch rw already touched.
std::uint64_t sw_tuples(std::uint64_t tuples_per_bucket, const HashTableSpec& ht,
                        std::uint64_t cache_line, SwMode mode) {
    if (mode == SwMode::LiteralEq7) return tuples_per_bucket;
    const std::uint64_t first_line_tuples =
        ht.header_bytes < cache_line ? (cache_line - ht.header_bytes) / ht.tuple_width : 0;
    return tuples_per_bucket > first_line_tuples ? tuples_per_bucket - first_line_tuples : 0;
}

}  // namespace

AccessCounts build_counts(const RelationStats& rel, const HashTableSpec& ht,
                          std::uint64_t cache_line, SwMode mode) {
    if (!ht.consistent_with(rel))
        throw std::invalid_argument("hash table spec inconsistent with build input");
    AccessCounts c;
    c.rw = rel.cardinality;
    c.sw = ht.bucket_count *
           bucket_write_events(sw_tuples(ht.tuples_per_bucket, ht, cache_line, mode),
                               ht.tuple_width, cache_line);
    return c;
}

std::uint64_t extra_probe_lines(const HashTableSpec& ht, std::uint64_t cache_line) {
    const std::uint64_t lines = ceil_div(ht.bucket_bytes, cache_line);
    return lines > 1 ? lines - 1 : 0;
}

AccessCounts probe_counts(const RelationStats& probe, const HashTableSpec& build_ht,
                          std::uint64_t cache_line) {
    AccessCounts c;
    c.rr = probe.cardinality;
    c.sr = probe.cardinality * extra_probe_lines(build_ht, cache_line);
    return c;
}

AccessCounts plan_counts(const PlanNode& plan, std::uint64_t cache_line, SwMode mode) {
    if (plan.is_scan()) return scan_counts(plan.output(), cache_line);
    AccessCounts c = build_counts(plan.build().output(), plan.build_table(), cache_line, mode);
    c += probe_counts(plan.probe().output(), plan.build_table(), cache_line);
    c += plan_counts(plan.build(), cache_line, mode);
    c += plan_counts(plan.probe(), cache_line, mode);
    return c;
}

double predicted_cost(const AccessCounts& counts, const WeightVector& weights) {
    if (!weights.valid()) throw std::invalid_argument("weights must be positive");
    return weights.sr * static_cast<double>(counts.sr) +
           weights.rr * static_cast<double>(counts.rr) +
           weights.sw * static_cast<double>(counts.sw) +
           weights.rw * static_cast<double>(counts.rw);
}

namespace {

void check_chain_sizes(std::span<const RelationStats> rels,
                       std::span<const RelationStats> intermediates,
                       std::span<const HashTableSpec> specs) {
    if (rels.size() < 2) throw std::invalid_argument("chain needs at least two relations");
    const std::size_t joins = rels.size() - 1;
    if (intermediates.size() != joins - 1 || specs.size() != joins)
        throw std::invalid_argument("closed form: list length mismatch");
}

}  // namespace

AccessCounts right_deep_closed_form(std::span<const RelationStats> rels,
                                    std::span<const RelationStats> intermediates,
                                    std::span<const HashTableSpec> specs,
                                    std::uint64_t cache_line, SwMode mode) {
    check_chain_sizes(rels, intermediates, specs);
    const std::size_t n = rels.size() - 1;
    AccessCounts c;
    // Base relation scans.
    for (const RelationStats& r : rels)
        c.sr += ceil_div(r.cardinality * r.tuple_width, cache_line);
    // Tables on R_1..R_n, built before the single probe pipeline runs.
    for (std::size_t j = 0; j < n; ++j) {
        c.rw += rels[j + 1].cardinality;
        c.sw += specs[j].bucket_count *
                bucket_write_events(
                    sw_tuples(specs[j].tuples_per_bucket, specs[j], cache_line, mode),
                    specs[j].tuple_width, cache_line);
    }
    // R_0 flows through all n stages; probe j's input is the previous output.
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t probe_card =
            j == 0 ? rels[0].cardinality : intermediates[j - 1].cardinality;
        c.rr += probe_card;
        c.sr += probe_card * extra_probe_lines(specs[j], cache_line);
    }
    return c;
}

AccessCounts left_deep_closed_form(std::span<const RelationStats> rels,
                                   std::span<const RelationStats> intermediates,
                                   std::span<const HashTableSpec> specs,
                                   std::uint64_t cache_line, SwMode mode) {
    check_chain_sizes(rels, intermediates, specs);
    const std::size_t n = rels.size() - 1;
    AccessCounts c;
    for (const RelationStats& r : rels)
        c.sr += ceil_div(r.cardinality * r.tuple_width, cache_line);
    // Build inputs: R_n first, then each intermediate result in turn.
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t build_card =
            j == 0 ? rels[n].cardinality : intermediates[j - 1].cardinality;
        c.rw += build_card;
        c.sw += specs[j].bucket_count *
                bucket_write_events(
                    sw_tuples(specs[j].tuples_per_bucket, specs[j], cache_line, mode),
                    specs[j].tuple_width, cache_line);
    }
    // Probe inputs are the base relations R_{n-1}..R_0.
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t probe_card = rels[n - 1 - j].cardinality;
        c.rr += probe_card;
        c.sr += probe_card * extra_probe_lines(specs[j], cache_line);
    }
    return c;
}

std::int64_t insight_rr_gap(std::span<const RelationStats> rels) {
    if (rels.size() < 2) throw std::invalid_argument("chain needs at least two relations");
    for (std::size_t i = 0; i + 1 < rels.size(); ++i)
        if (rels[i].cardinality > rels[i + 1].cardinality)
            throw std::invalid_argument("insight_rr_gap expects ascending cardinalities");
    const std::size_t n = rels.size() - 1;
    std::int64_t gap = static_cast<std::int64_t>(n) *
                       static_cast<std::int64_t>(rels[n].cardinality);
    for (std::size_t i = 1; i <= n; ++i)
        gap -= static_cast<std::int64_t>(rels[i].cardinality);
    return gap;
}

}  // namespace memjoin
