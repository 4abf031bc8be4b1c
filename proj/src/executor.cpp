#include "memjoin/executor.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <stdexcept>
#include <thread>

namespace memjoin {

namespace {

using Clock = std::chrono::steady_clock;

struct RangeInfo {
    std::size_t lo, hi;
};

RangeInfo node_range(const PlanNode& p) {
    if (p.is_scan()) {
        if (p.relation_id() < 0) throw std::invalid_argument("unannotated plan leaf");
        const auto id = static_cast<std::size_t>(p.relation_id());
        return {id, id};
    }
    const RangeInfo b = node_range(p.build());
    const RangeInfo pr = node_range(p.probe());
    return {std::min(b.lo, pr.lo), std::max(b.hi, pr.hi)};
}

struct Compiler {
    const Database& db;
    HashMode mode;
    CompiledPlan out;

    HashTable* make_table(const PlanNode& join) {
        out.tables.push_back(std::make_unique<HashTable>(join.build_table(), mode));
        return out.tables.back().get();
    }

    /// Emit, in execution order, the pipelines that fill every table in the
    /// subtree rooted at `node` and finally stream `node`'s own probe spine
    /// into `sink`.
    void emit_subtree(const PlanNode& node, PipelineSink sink) {
        if (node.is_scan()) {
            if (static_cast<std::size_t>(node.relation_id()) >= db.size())
                throw std::invalid_argument("plan references unknown relation");
            out.pipelines.push_back(CompiledPipeline{node.relation_id(), {}, sink,
                                                     "scan " + std::to_string(node.relation_id())});
            return;
        }
        // Probe spine: the chain of joins reached by following probe children.
        std::vector<const PlanNode*> spine;
        const PlanNode* cur = &node;
        while (!cur->is_scan()) {
            spine.push_back(cur);
            cur = &cur->probe();
        }
        // Fill each spine join's table, innermost build first.
        std::vector<HashTable*> spine_tables(spine.size());
        for (std::size_t i = spine.size(); i-- > 0;) {
            const PlanNode* join = spine[i];
            HashTable* table = make_table(*join);
            spine_tables[i] = table;
            const RangeInfo br = node_range(join->build());
            const RangeInfo pr = node_range(join->probe());
            emit_subtree(join->build(), PipelineSink{table, br.hi < pr.lo});
        }
        // The spine pipeline itself: scan the probe-most leaf, probe each
        // spine join bottom-up, deliver to the caller's sink.
        if (static_cast<std::size_t>(cur->relation_id()) >= db.size())
            throw std::invalid_argument("plan references unknown relation");
        CompiledPipeline pipe;
        pipe.source_relation = cur->relation_id();
        for (std::size_t i = spine.size(); i-- > 0;) {
            const RangeInfo br = node_range(spine[i]->build());
            const RangeInfo pr = node_range(spine[i]->probe());
            pipe.stages.push_back(CompiledStage{spine_tables[i], br.hi < pr.lo});
        }
        pipe.sink = sink;
        pipe.label = (sink.table ? "build from scan " : "probe from scan ") +
                     std::to_string(cur->relation_id());
        out.pipelines.push_back(std::move(pipe));
    }
};

struct WorkerTotals {
    std::uint64_t aggregate = 0;
    std::uint64_t rows = 0;
};

/// Streams one worker's share of a pipeline. Per-stage output buffers are
/// flushed downstream when full and cascaded at the end of the input range.
class PipelineWorker {
public:
    PipelineWorker(const CompiledPipeline& pipe, const ExecOptions& opt, WorkerTotals& totals)
        : pipe_(pipe), opt_(opt), totals_(totals), buffers_(pipe.stages.size()) {
        for (auto& b : buffers_) b.reserve(opt.batch_size);
    }

    void run(const Relation& source, std::uint64_t begin, std::uint64_t end) {
        std::vector<PipelineTuple> batch;
        batch.reserve(opt_.batch_size);
        for (std::uint64_t i = begin; i < end; ++i) {
            batch.push_back(PipelineTuple{source.key[i], source.ref[i]});
            if (batch.size() == opt_.batch_size) {
                process(0, batch);
                batch.clear();
            }
        }
        if (!batch.empty()) process(0, batch);
        flush();
    }

private:
    static std::uint64_t probe_key(const PipelineTuple& t, bool build_is_lower) {
        // Build side below the crossing edge: the probe tuple connects with
        // its low key (R_{e+1}.a); otherwise with its high key (R_e.b).
        return build_is_lower ? t.lo : t.hi;
    }

    void process(std::size_t level, const std::vector<PipelineTuple>& in) {
        if (level == pipe_.stages.size()) {
            deliver(in);
            return;
        }
        const CompiledStage& stage = pipe_.stages[level];
        std::vector<PipelineTuple>& out = buffers_[level];
        if (opt_.prefetch) {
            for (const PipelineTuple& t : in)
                __builtin_prefetch(stage.table->bucket_address(probe_key(t, stage.build_is_lower)),
                                   0, 1);
        }
        for (const PipelineTuple& t : in) {
            const std::uint64_t key = probe_key(t, stage.build_is_lower);
            stage.table->for_each_match(key, [&](std::uint64_t payload) {
                out.push_back(stage.build_is_lower ? PipelineTuple{payload, t.hi}
                                                   : PipelineTuple{t.lo, payload});
                if (out.size() == opt_.batch_size) {
                    process(level + 1, out);
                    out.clear();
                }
            });
        }
    }

    void flush() {
        for (std::size_t level = 0; level < buffers_.size(); ++level) {
            if (!buffers_[level].empty()) {
                process(level + 1, buffers_[level]);
                buffers_[level].clear();
            }
        }
    }

    void deliver(const std::vector<PipelineTuple>& batch) {
        if (pipe_.sink.table) {
            HashTable* table = pipe_.sink.table;
            const bool lower = pipe_.sink.build_is_lower;
            for (const PipelineTuple& t : batch) {
                if (lower)
                    table->insert(t.hi, t.lo);
                else
                    table->insert(t.lo, t.hi);
            }
        } else {
            for (const PipelineTuple& t : batch) totals_.aggregate += t.lo + t.hi;
            totals_.rows += batch.size();
        }
    }

    const CompiledPipeline& pipe_;
    const ExecOptions& opt_;
    WorkerTotals& totals_;
    std::vector<std::vector<PipelineTuple>> buffers_;
};

}  // namespace

CompiledPlan compile_plan(const PlanNode& plan, const Database& db, HashMode mode) {
    Compiler c{db, mode, {}};
    c.emit_subtree(plan, PipelineSink{});
    for (const auto& t : c.out.tables) c.out.table_bytes += t->allocated_bytes();
    return std::move(c.out);
}

std::unique_ptr<HashTable> build_hash_table(const Relation& source, bool key_is_ref,
                                            const HashTableSpec& spec, HashMode mode,
                                            unsigned workers) {
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    auto table = std::make_unique<HashTable>(spec, mode);
    const std::uint64_t n = source.size();
    std::vector<std::thread> team;
    team.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        team.emplace_back([&, begin, end] {
            for (std::uint64_t i = begin; i < end; ++i) {
                if (key_is_ref)
                    table->insert(source.ref[i], source.key[i]);
                else
                    table->insert(source.key[i], source.ref[i]);
            }
        });
    }
    for (std::thread& t : team) t.join();  // phase barrier
    return table;
}

ExecutionReport execute_plan(const NamedPlan& plan, const Database& db,
                             const ExecOptions& options) {
    unsigned workers = options.workers;
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    ExecOptions opt = options;
    opt.workers = workers;
    if (opt.batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");

    // Tables are allocated (and zeroed) before the clock starts.
    CompiledPlan compiled = compile_plan(plan.plan, db, opt.hash);

    ExecutionReport report;
    const auto t_start = Clock::now();
    for (const CompiledPipeline& pipe : compiled.pipelines) {
        const Relation& source = db[static_cast<std::size_t>(pipe.source_relation)];
        std::vector<WorkerTotals> totals(workers);
        const auto t0 = Clock::now();
        std::vector<std::thread> team;
        team.reserve(workers);
        const std::uint64_t n = source.size();
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = n * w / workers;
            const std::uint64_t end = n * (w + 1) / workers;
            team.emplace_back([&, w, begin, end] {
                PipelineWorker runner(pipe, opt, totals[w]);
                runner.run(source, begin, end);
            });
        }
        for (std::thread& t : team) t.join();
        const auto t1 = Clock::now();
        report.phases.push_back(
            PhaseTime{pipe.label, std::chrono::duration<double>(t1 - t0).count()});
        if (!pipe.sink.table) {
            for (const WorkerTotals& wt : totals) {
                report.aggregate += wt.aggregate;
                report.output_cardinality += wt.rows;
            }
        }
    }
    report.total_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
    report.peak_bytes = 0;
    for (const auto& t : compiled.tables) report.peak_bytes += t->allocated_bytes();
    return report;
}

}  // namespace memjoin
