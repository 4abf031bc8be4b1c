#include "memjoin/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "memjoin/executor.hpp"
#include "memjoin/model.hpp"
#include "memjoin/rng.hpp"

namespace memjoin {

namespace {

/// Bucket-accurate but latch-free stand-in for the executor's table. Slot
/// capacity comes from the spec; everything past it chains.
class SimTable {
public:
    SimTable(const HashTableSpec& spec, HashMode mode) : spec_(spec), mode_(mode) {
        buckets_.resize(spec.bucket_count);
    }

    std::uint64_t bucket_index(std::uint64_t key) const {
        return mode_ == HashMode::IdentityMod ? (key - 1) % spec_.bucket_count
                                              : mix64(key) % spec_.bucket_count;
    }

    /// Returns true when the tuple spilled to the overflow chain.
    bool insert(std::uint64_t key, std::uint64_t payload) {
        Bucket& b = buckets_[bucket_index(key)];
        b.tuples.emplace_back(key, payload);
        return b.tuples.size() > spec_.tuples_per_bucket;
    }

    const HashTableSpec& spec() const { return spec_; }

    struct Bucket {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> tuples;
    };
    const std::vector<Bucket>& buckets() const { return buckets_; }
    const Bucket& bucket_for(std::uint64_t key) const { return buckets_[bucket_index(key)]; }

    std::uint64_t slot_occupancy(const Bucket& b) const {
        return std::min<std::uint64_t>(b.tuples.size(), spec_.tuples_per_bucket);
    }
    std::uint64_t chain_length(const Bucket& b) const {
        return b.tuples.size() > spec_.tuples_per_bucket
                   ? b.tuples.size() - spec_.tuples_per_bucket
                   : 0;
    }

private:
    HashTableSpec spec_;
    HashMode mode_;
    std::vector<Bucket> buckets_;
};

std::uint64_t sw_tuples_for(std::uint64_t occupancy, const HashTableSpec& spec,
                            std::uint64_t cache_line, SwMode mode) {
    if (mode == SwMode::LiteralEq7) return occupancy;
    const std::uint64_t first_line =
        spec.header_bytes < cache_line ? (cache_line - spec.header_bytes) / spec.tuple_width : 0;
    return occupancy > first_line ? occupancy - first_line : 0;
}

struct Simulator {
    const Database& db;
    std::uint64_t cache_line;
    SwMode mode;
    HashMode hash;
    OracleCounts out;
    std::vector<std::unique_ptr<SimTable>> tables;

    AccessCounts& op(const std::string& name) {
        out.per_operator.push_back({name, {}});
        return out.per_operator.back().counts;
    }

    /// Stream of tuples flowing between operators.
    using Stream = std::vector<PipelineTuple>;

    Stream probe_stage(const Stream& in, SimTable* table, bool build_is_lower, int pipe_index,
                       std::size_t stage) {
        AccessCounts& c =
            op("probe p" + std::to_string(pipe_index) + "s" + std::to_string(stage));
        Stream next;
        const HashTableSpec& spec = table->spec();
        for (const PipelineTuple& t : in) {
            const std::uint64_t key = build_is_lower ? t.lo : t.hi;
            const SimTable::Bucket& b = table->bucket_for(key);
            c.rr += 1;  // first bucket line
            const std::uint64_t occ = table->slot_occupancy(b);
            const std::uint64_t lines =
                ceil_div(spec.header_bytes + occ * spec.tuple_width, cache_line);
            c.sr += lines > 1 ? lines - 1 : 0;
            c.rr += table->chain_length(b);  // pointer chase per node
            for (const auto& [bkey, payload] : b.tuples) {
                if (bkey == key)
                    next.push_back(build_is_lower ? PipelineTuple{payload, t.hi}
                                                  : PipelineTuple{t.lo, payload});
            }
        }
        out.total += c;
        return next;
    }

    void build_sink(const Stream& in, SimTable* table, bool build_is_lower, int pipe_index) {
        AccessCounts& c = op("build p" + std::to_string(pipe_index));
        for (const PipelineTuple& t : in) {
            c.rw += 1;  // header line: latch acquire + release
            if (table->insert(build_is_lower ? t.hi : t.lo, build_is_lower ? t.lo : t.hi))
                c.sw += 1;  // arena append for the chain node
        }
        // Slot packing events, on actual occupancy.
        const HashTableSpec& spec = table->spec();
        for (const auto& b : table->buckets()) {
            c.sw += bucket_write_events(
                sw_tuples_for(table->slot_occupancy(b), spec, cache_line, mode),
                spec.tuple_width, cache_line);
        }
        out.total += c;
    }

    // Mirror of CompiledPipeline that carries SimTable pointers instead.
    struct SimPipeline {
        int source_relation;
        std::vector<CompiledStage> stages;
        std::vector<SimTable*> sim_stage_tables;
        SimTable* sink_table = nullptr;
        bool sink_is_lower = false;
    };
};

}  // namespace

OracleCounts simulate_counts(const NamedPlan& plan, const Database& db,
                             std::uint64_t cache_line, SwMode mode, HashMode hash) {
    // Reuse the executor's pipeline decomposition so both walk the same
    // algorithm; swap the concurrent tables for counting ones.
    CompiledPlan compiled = compile_plan(plan.plan, db, hash);

    Simulator sim{db, cache_line, mode, hash, {}, {}};
    std::vector<SimTable*> sim_tables;
    for (const auto& t : compiled.tables) {
        sim.tables.push_back(std::make_unique<SimTable>(t->spec(), hash));
        sim_tables.push_back(sim.tables.back().get());
    }
    auto table_index = [&](const HashTable* t) -> std::size_t {
        for (std::size_t i = 0; i < compiled.tables.size(); ++i)
            if (compiled.tables[i].get() == t) return i;
        throw std::logic_error("stage table not found");
    };

    int pipe_index = 0;
    std::uint64_t final_rows = 0;
    for (const CompiledPipeline& pipe : compiled.pipelines) {
        // Rebind stage and sink tables to the counting variants.
        Simulator::SimPipeline sp;
        sp.source_relation = pipe.source_relation;
        sp.stages = pipe.stages;
        for (const CompiledStage& st : pipe.stages)
            sp.sim_stage_tables.push_back(sim_tables[table_index(st.table)]);
        if (pipe.sink.table) {
            sp.sink_table = sim_tables[table_index(pipe.sink.table)];
            sp.sink_is_lower = pipe.sink.build_is_lower;
        }

        const Relation& src = db[static_cast<std::size_t>(sp.source_relation)];
        AccessCounts& scan = sim.op("scan R" + std::to_string(sp.source_relation));
        scan.sr = ceil_div(src.size() * 16, cache_line);
        sim.out.total += scan;

        std::vector<PipelineTuple> cur(src.size());
        for (std::uint64_t i = 0; i < src.size(); ++i)
            cur[i] = PipelineTuple{src.key[i], src.ref[i]};
        for (std::size_t s = 0; s < sp.stages.size(); ++s)
            cur = sim.probe_stage(cur, sp.sim_stage_tables[s], sp.stages[s].build_is_lower,
                                  pipe_index, s);
        if (sp.sink_table)
            sim.build_sink(cur, sp.sink_table, sp.sink_is_lower, pipe_index);
        else
            final_rows += cur.size();
        ++pipe_index;
    }
    (void)final_rows;  // final materialization is uncosted, as in the model
    return std::move(sim.out);
}

}  // namespace memjoin
