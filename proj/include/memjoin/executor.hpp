#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "memjoin/hash_table.hpp"
#include "memjoin/plan_space.hpp"
#include "memjoin/relation.hpp"

namespace memjoin {

struct ExecOptions {
    unsigned workers = 0;          // 0 = hardware concurrency
    std::uint32_t batch_size = 1024;
    bool prefetch = false;         // peek ahead within the batch for bucket lines
    HashMode hash = HashMode::Multiplicative;
};

struct PhaseTime {
    std::string label;
    double seconds = 0;
};

struct ExecutionReport {
    std::vector<PhaseTime> phases;  // one per build pipeline plus the final probe
    double total_seconds = 0;       // excludes table allocation
    std::uint64_t output_cardinality = 0;
    std::uint64_t aggregate = 0;    // SUM(R_0.a + R_n.b) over the join result
    std::uint64_t peak_bytes = 0;   // hash tables plus overflow arenas
};

/// A 16-byte tuple flowing through a pipeline. For a subtree covering
/// relations [x, y]: lo is R_x.a (or the R_0.a aggregate column once x==0),
/// hi is R_y.b (or the R_n.b aggregate column once y==n).
struct PipelineTuple {
    std::uint64_t lo;
    std::uint64_t hi;
};

/// One executable stage: probe `table`; `build_is_lower` records which side
/// of the crossing edge was built, which fixes the probe key column and how
/// matches are combined.
struct CompiledStage {
    const HashTable* table;
    bool build_is_lower;
};

/// Where a pipeline's tuples end up: inserted into a parent join's table or
/// folded into the final aggregate.
struct PipelineSink {
    HashTable* table = nullptr;  // nullptr = aggregate sink
    bool build_is_lower = false; // meaning as above, for the insert key
};

struct CompiledPipeline {
    int source_relation;
    std::vector<CompiledStage> stages;  // deepest spine join first
    PipelineSink sink;
    std::string label;
};

/// The executable form of a plan: all hash tables pre-allocated, pipelines
/// listed in dependency order (every table is filled before a later pipeline
/// probes it). Build subtrees run one at a time, each with all workers.
struct CompiledPlan {
    std::vector<std::unique_ptr<HashTable>> tables;
    std::vector<CompiledPipeline> pipelines;
    std::uint64_t table_bytes = 0;
};

CompiledPlan compile_plan(const PlanNode& plan, const Database& db, HashMode mode);

/// Build a hash table from one relation with `workers` threads: the input is
/// split into equi-sized ranges, every worker latches the target bucket per
/// tuple, and the table is complete when this returns. `key_is_ref` selects
/// attribute b as the key (payload a), else a (payload b).
std::unique_ptr<HashTable> build_hash_table(const Relation& source, bool key_is_ref,
                                            const HashTableSpec& spec, HashMode mode,
                                            unsigned workers);

/// Run the plan. Table allocation happens before timing starts; phase times
/// cover each pipeline's barrier-to-barrier region.
ExecutionReport execute_plan(const NamedPlan& plan, const Database& db,
                             const ExecOptions& options = {});

}  // namespace memjoin
