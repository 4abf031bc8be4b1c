#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "memjoin/plan.hpp"
#include "memjoin/types.hpp"

namespace memjoin {

// Memory I/O cost model. All counts are exact integer arithmetic; ceil and
// floor appear exactly where the closed formulas put them. No floating point
// enters until weights are applied.

/// Cache lines read by a full sequential scan of `rel`.
AccessCounts scan_counts(const RelationStats& rel, std::uint64_t cache_line);

/// M(T, W): write events triggered by packing `tuples` tuples of width
/// `tuple_width` back to back into one bucket, counted as distinct
/// (tuple, cache line) incidences. Zero tuples cost nothing.
std::uint64_t bucket_write_events(std::uint64_t tuples, std::uint64_t tuple_width,
                                  std::uint64_t cache_line);

/// Build-phase counts for inserting `rel` into the table described by `ht`:
/// one rw per tuple for the bucket header, plus the mode-dependent sw term
/// for slots beyond the first line.
AccessCounts build_counts(const RelationStats& rel, const HashTableSpec& ht,
                          std::uint64_t cache_line, SwMode mode);

/// L(R): sequential lines read per probe beyond the bucket's first line.
std::uint64_t extra_probe_lines(const HashTableSpec& ht, std::uint64_t cache_line);

/// Probe-phase counts for streaming `probe` against `build_ht`: one rr per
/// probe tuple plus L(R) sequential lines each. Output materialization is
/// uncosted; it is identical across plans.
AccessCounts probe_counts(const RelationStats& probe, const HashTableSpec& build_ht,
                          std::uint64_t cache_line);

/// Whole-plan counts: the recursion over the join tree. Scan leaves
/// contribute scan_counts; every join adds the build counts of its build
/// child's output and the probe counts of its probe child's output.
/// Throws std::invalid_argument if a join's table spec is inconsistent with
/// its build child's output.
AccessCounts plan_counts(const PlanNode& plan, std::uint64_t cache_line, SwMode mode);

/// Weighted scalar cost of a set of counts. Dimensionless; comparable only
/// between predictions made with the same machine profile.
double predicted_cost(const AccessCounts& counts, const WeightVector& weights);

/// Closed form for the right-deep chain plan over rels R_0..R_n where R_0 is
/// the pipelined probe relation and tables are built on R_1..R_n.
/// `intermediates` holds the outputs of the first n-1 probes (the final
/// output never enters the counts); `specs[j]` describes the table on
/// R_{j+1}. Throws std::invalid_argument on length mismatch.
AccessCounts right_deep_closed_form(std::span<const RelationStats> rels,
                                    std::span<const RelationStats> intermediates,
                                    std::span<const HashTableSpec> specs,
                                    std::uint64_t cache_line, SwMode mode);

/// Closed form for the left-deep chain plan over the same rels: the table on
/// R_n is built first, then R_{n-1}..R_0 probe in turn and each result is
/// rebuilt into the next table. `specs[0]` describes the table on R_n and
/// `specs[j]` (j >= 1) the table on intermediates[j-1].
AccessCounts left_deep_closed_form(std::span<const RelationStats> rels,
                                   std::span<const RelationStats> intermediates,
                                   std::span<const HashTableSpec> specs,
                                   std::uint64_t cache_line, SwMode mode);

/// For a PK-FK chain sorted by ascending cardinality, the number of extra rr
/// accesses the right-deep strategy pays over the left-deep one:
/// n*|R_n| - sum_{i=1..n} |R_i|. Rejects unsorted input.
std::int64_t insight_rr_gap(std::span<const RelationStats> ascending_rels);

}  // namespace memjoin
