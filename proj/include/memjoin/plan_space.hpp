#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "memjoin/plan.hpp"
#include "memjoin/types.hpp"

namespace memjoin {

/// Join characteristics of one chain edge R_k.b = R_{k+1}.a, described from
/// the probe direction of the referencing side: `match_probability` is the
/// fraction of R_k tuples whose b value is a live key, `fanout` the number of
/// R_{k+1} matches each such tuple finds. zipf_factor > 0 switches the
/// generator to Zipf-distributed key references.
struct JoinSpec {
    double match_probability = 1.0;
    double fanout = 1.0;
    double zipf_factor = 0.0;

    bool valid() const {
        return match_probability >= 0.0 && match_probability <= 1.0 && fanout >= 0.0 &&
               zipf_factor >= 0.0;
    }
};

/// How the plan annotator sizes each join's hash table.
struct TableSizing {
    enum class Policy { Pow2AtLeastCard, ExactCard, FixedCount, CardOverLoad };
    Policy policy = Policy::Pow2AtLeastCard;
    std::uint64_t fixed_count = 0;   // FixedCount
    double load_factor = 1.0;        // CardOverLoad
    std::uint64_t header_bytes = 16;

    std::uint64_t bucket_count_for(std::uint64_t cardinality) const;
};

/// A multi-join query whose predicates connect only adjacent relations.
struct ChainQuery {
    std::vector<RelationStats> relations;  // R_0..R_n in chain order
    std::vector<JoinSpec> joins;           // joins[k] describes the R_k/R_{k+1} edge
    std::uint64_t intermediate_width = 16;
    TableSizing sizing;

    std::size_t relation_count() const { return relations.size(); }
    void validate() const;  // throws std::invalid_argument

    /// Estimated output cardinality of the join over relations [lo, hi]:
    /// |R_lo| scaled by the match probability and fanout of every internal edge.
    std::uint64_t range_output_cardinality(std::size_t lo, std::size_t hi) const;
};

struct NamedPlan {
    std::string name;
    PlanNode plan;
};

/// All cross-product-free binary join trees over the chain, each split
/// emitted twice (either side may build), fully annotated and named.
/// Order is deterministic: by range, split position, then build-side-left
/// before build-side-right, recursively.
std::vector<NamedPlan> enumerate_plans(const ChainQuery& q);

/// Number of plans enumerate_plans produces for a chain of `relations`
/// relations: the range DP count T(1)=1, T(m) = sum 2*T(a)*T(b).
std::uint64_t plan_space_size(std::size_t relations);

/// Annotate a bare plan structure (leaves carry relation ids only) with
/// propagated output cardinalities and hash table specs. Throws if the
/// leaves are not a permutation of one contiguous relation range.
PlanNode propagate_cardinalities(const PlanNode& plan, const ChainQuery& q);

/// Figure-4 style name for 4-leaf plans (shape letter + leaves left to
/// right, build side drawn left); canonical grammar text otherwise.
std::string plan_name(const PlanNode& plan);

/// Inverse of plan_name for the 4-leaf vocabulary and for grammar text.
/// The result is annotated against `q`.
PlanNode parse_plan_name(std::string_view name, const ChainQuery& q);

/// Fully left-deep plan over leaves n..0: the table on R_n is built first
/// and every intermediate result feeds the next build. Annotated. Its
/// 4-relation name is "L3210".
PlanNode make_left_deep_plan(const ChainQuery& q);

/// Fully right-deep plan over leaves n..0: tables on R_n..R_1, with R_0
/// streaming through the whole probe pipeline. Name "R3210" at 4 relations.
PlanNode make_right_deep_plan(const ChainQuery& q);

}  // namespace memjoin
