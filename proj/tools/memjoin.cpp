// memjoin: calibrate a machine profile, enumerate hash-join plans for chain
// queries, predict their memory I/O cost, execute them for ground truth, and
// compare predictions against measurements. All outputs are UTF-8 CSV with a
// header row, sorted by plan name.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "memjoin/bench.hpp"
#include "memjoin/config.hpp"
#include "memjoin/disk_model.hpp"
#include "memjoin/executor.hpp"
#include "memjoin/model.hpp"
#include "memjoin/oracle.hpp"
#include "memjoin/profile.hpp"
#include "memjoin/relation.hpp"
#include "memjoin/stats.hpp"

namespace mj = memjoin;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open for writing: " + path);
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }
    void row(const std::vector<std::string>& cells) {
        std::ostream& os = out();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    }

private:
    std::ofstream file_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("CSV is missing a '" + name + "' column");
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

std::uint64_t planned_table_bytes(const mj::PlanNode& p) {
    if (p.is_scan()) return 0;
    const mj::HashTableSpec& s = p.build_table();
    return s.bucket_count * s.bucket_bytes + planned_table_bytes(p.build()) +
           planned_table_bytes(p.probe());
}

mj::SwMode parse_sw_mode(const std::string& name) {
    if (name == "table") return mj::SwMode::TableConsistent;
    if (name == "literal") return mj::SwMode::LiteralEq7;
    throw CLI::ValidationError("--sw-mode", "expected 'table' or 'literal'");
}

std::uint64_t effective_cache_line(const mj::ExperimentConfig& cfg,
                                   const mj::MachineProfile* profile) {
    if (cfg.cache_line_bytes != 0) return cfg.cache_line_bytes;
    if (profile) return profile->cache_line_bytes;
    return mj::detect_cache_line_bytes();
}

int cmd_bootstrap(const std::string& out_path, const std::string& label, unsigned workers,
                  int reps, std::uint64_t array_bytes, std::uint64_t seed, bool check) {
    mj::BenchConfig cfg;
    cfg.worker_count = workers;
    cfg.repetitions = reps;
    cfg.array_bytes = array_bytes;
    cfg.seed = seed;

    mj::MachineProfile profile = mj::bootstrap_profile(cfg, label);
    if (check) {
        cfg.seed = seed + 1;
        const mj::MachineProfile second = mj::bootstrap_profile(cfg, label);
        double worst = 0;
        for (mj::AccessPattern p : mj::kAllPatterns) {
            const double a = profile.weights[p];
            const double b = second.weights[p];
            worst = std::max(worst, std::abs(a - b) / std::max(a, b));
        }
        std::cerr << "repeatability: max relative weight deviation "
                  << fmt(worst * 100) << "% across two runs\n";
        if (worst > 0.10)
            std::cerr << "warning: weights deviate by more than 10% between runs; "
                         "consider a larger --array-bytes or a quieter machine\n";
    }
    for (const std::string& w : mj::weight_warnings(profile.weights))
        std::cerr << "warning: " << w << "\n";

    mj::save_profile(profile, out_path);
    std::cerr << "profile written to " << out_path << ": weights (sr rr sw rw) = "
              << fmt(profile.weights.sr) << " " << fmt(profile.weights.rr) << " "
              << fmt(profile.weights.sw) << " " << fmt(profile.weights.rw)
              << ", cache line " << profile.cache_line_bytes << " B\n";
    return 0;
}

int cmd_enumerate(mj::ExperimentConfig cfg, double scale, const std::string& out_path) {
    cfg.apply_scale(scale);
    std::vector<mj::NamedPlan> plans = mj::enumerate_plans(cfg.query);
    std::sort(plans.begin(), plans.end(),
              [](const mj::NamedPlan& a, const mj::NamedPlan& b) { return a.name < b.name; });
    CsvWriter csv(out_path);
    csv.row({"plan", "tree", "output_cardinality"});
    for (const mj::NamedPlan& p : plans)
        csv.row({p.name, mj::to_grammar(p.plan), std::to_string(p.plan.output().cardinality)});
    std::cerr << plans.size() << " plans\n";
    return 0;
}

int cmd_predict(mj::ExperimentConfig cfg, const mj::MachineProfile& profile, double scale,
                mj::SwMode mode, const std::string& out_path) {
    cfg.apply_scale(scale);
    const std::uint64_t cl = effective_cache_line(cfg, &profile);
    std::vector<mj::NamedPlan> plans = mj::enumerate_plans(cfg.query);
    std::sort(plans.begin(), plans.end(),
              [](const mj::NamedPlan& a, const mj::NamedPlan& b) { return a.name < b.name; });
    CsvWriter csv(out_path);
    csv.row({"plan", "sr", "rr", "sw", "rw", "cost"});
    for (const mj::NamedPlan& p : plans) {
        const mj::AccessCounts c = mj::plan_counts(p.plan, cl, mode);
        csv.row({p.name, std::to_string(c.sr), std::to_string(c.rr), std::to_string(c.sw),
                 std::to_string(c.rw), fmt(mj::predicted_cost(c, profile.weights))});
    }
    return 0;
}

int cmd_run(mj::ExperimentConfig cfg, double scale, int reps_override,
            unsigned workers_override, std::uint64_t seed_override, bool skip_oracle,
            mj::SwMode mode, const std::string& out_path) {
    cfg.apply_scale(scale);
    if (reps_override > 0) cfg.repetitions = reps_override;
    if (workers_override > 0) cfg.workers = workers_override;
    if (seed_override != 0) cfg.seed = seed_override;
    const std::uint64_t cl = effective_cache_line(cfg, nullptr);

    std::uint64_t bytes_needed = 0;
    for (const mj::RelationStats& r : cfg.query.relations)
        bytes_needed += r.cardinality * r.tuple_width;
    std::cerr << "generating database (" << bytes_needed / (1024 * 1024) << " MiB base data, seed "
              << cfg.seed << ")\n";
    mj::Database db;
    try {
        db = mj::generate_database(cfg.query, cfg.seed);
    } catch (const std::bad_alloc&) {
        std::cerr << "out of memory: the base relations alone need about "
                  << bytes_needed / (1024 * 1024)
                  << " MiB; shrink the dataset with --scale\n";
        return 1;
    }

    std::vector<mj::NamedPlan> plans = mj::enumerate_plans(cfg.query);
    std::sort(plans.begin(), plans.end(),
              [](const mj::NamedPlan& a, const mj::NamedPlan& b) { return a.name < b.name; });

    CsvWriter csv(out_path);
    csv.row({"plan", "reps", "mean_seconds", "min_seconds", "phase_seconds",
             "output_cardinality", "aggregate", "oracle_sr", "oracle_rr", "oracle_sw",
             "oracle_rw", "oracle_reads", "oracle_writes"});
    std::uint64_t common_aggregate = 0;
    bool first_plan = true;
    for (const mj::NamedPlan& p : plans) {
        double sum = 0, best = 0;
        mj::ExecutionReport report;
        try {
            for (int r = 0; r < cfg.repetitions; ++r) {
                report = mj::execute_plan(p, db, cfg.exec_options());
                sum += report.total_seconds;
                best = r == 0 ? report.total_seconds : std::min(best, report.total_seconds);
            }
        } catch (const std::bad_alloc&) {
            std::cerr << "out of memory executing " << p.name << ": its hash tables need about "
                      << planned_table_bytes(p.plan) / (1024 * 1024)
                      << " MiB on top of " << bytes_needed / (1024 * 1024)
                      << " MiB of base data; shrink the dataset with --scale\n";
            return 1;
        }
        if (first_plan) {
            common_aggregate = report.aggregate;
            first_plan = false;
        } else if (report.aggregate != common_aggregate) {
            std::cerr << "warning: plan " << p.name
                      << " produced a different aggregate; join logic is broken\n";
        }
        std::string phases;  // last repetition's breakdown, semicolon separated
        for (const mj::PhaseTime& ph : report.phases) {
            if (!phases.empty()) phases += ';';
            phases += ph.label + "=" + fmt(ph.seconds);
        }
        std::replace(phases.begin(), phases.end(), ' ', '_');
        mj::AccessCounts oc;
        if (!skip_oracle) oc = mj::simulate_counts(p, db, cl, mode, cfg.hash).total;
        csv.row({p.name, std::to_string(cfg.repetitions), fmt(sum / cfg.repetitions), fmt(best),
                 phases, std::to_string(report.output_cardinality),
                 std::to_string(report.aggregate), std::to_string(oc.sr),
                 std::to_string(oc.rr), std::to_string(oc.sw), std::to_string(oc.rw),
                 std::to_string(oc.total_reads()), std::to_string(oc.total_writes())});
        std::cerr << p.name << " mean " << fmt(sum / cfg.repetitions) << " s\n";
    }
    return 0;
}

int cmd_compare(const std::string& predicted_path, const std::string& measured_path,
                const std::string& baseline, const std::string& out_path) {
    const CsvTable pred = read_csv(predicted_path);
    const CsvTable meas = read_csv(measured_path);
    const std::size_t pn = pred.column("plan"), pc = pred.column("cost");
    const std::size_t mn = meas.column("plan"), mc = meas.column("mean_seconds");

    std::map<std::string, double> observed;
    for (const auto& row : meas.rows) observed[row[mn]] = std::stod(row[mc]);

    std::vector<std::string> names, missing;
    std::vector<double> xs, ys;
    for (const auto& row : pred.rows) {
        const auto it = observed.find(row[pn]);
        if (it == observed.end()) {
            missing.push_back(row[pn]);
            continue;
        }
        names.push_back(row[pn]);
        xs.push_back(std::stod(row[pc]));
        ys.push_back(it->second);
    }
    if (!missing.empty()) {
        std::cerr << "error: plans missing from the measured CSV:";
        for (const std::string& m : missing) std::cerr << ' ' << m;
        std::cerr << '\n';
        return 1;
    }
    if (names.empty()) {
        std::cerr << "error: no common plans\n";
        return 1;
    }

    const mj::AccuracyReport report = mj::accuracy_report(xs, ys, names, baseline);
    CsvWriter csv(out_path);
    csv.row({"plan", "predicted", "observed", "error_pct", "band_flag", "predicted_slowdown",
             "observed_slowdown"});
    for (const mj::AccuracyRow& row : report.rows)
        csv.row({row.name, fmt(row.predicted), fmt(row.observed), fmt(row.error_pct),
                 row.within_band ? "1" : "0", fmt(row.predicted_slowdown),
                 fmt(row.observed_slowdown)});
    std::cout << "r_p=" << (report.pearson ? fmt(*report.pearson) : "undefined")
              << " r_s=" << (report.spearman ? fmt(*report.spearman) : "undefined")
              << " band15=" << fmt(report.band_fraction)
              << " baseline=" << report.baseline << "\n";
    return 0;
}

int cmd_pipeline(int max_joins, std::uint64_t base_cardinality, double ratio,
                 const mj::MachineProfile& profile, mj::SwMode mode, bool measure,
                 unsigned workers, std::uint64_t seed, const std::string& out_path) {
    if (max_joins < 1) throw CLI::ValidationError("--max-joins", "must be >= 1");
    const std::uint64_t cl = profile.cache_line_bytes;
    CsvWriter csv(out_path);
    if (measure)
        csv.row({"joins", "cost_left", "cost_right", "cost_ratio", "seconds_left",
                 "seconds_right"});
    else
        csv.row({"joins", "cost_left", "cost_right", "cost_ratio"});

    for (int n = 1; n <= max_joins; ++n) {
        mj::ChainQuery q;
        double card = static_cast<double>(base_cardinality);
        for (int i = 0; i <= n; ++i) {
            q.relations.push_back(mj::RelationStats{
                std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(card))), 16});
            card /= ratio;
        }
        q.joins.resize(n);

        const mj::PlanNode left = mj::make_left_deep_plan(q);
        const mj::PlanNode right = mj::make_right_deep_plan(q);
        const double cost_l = mj::predicted_cost(mj::plan_counts(left, cl, mode), profile.weights);
        const double cost_r =
            mj::predicted_cost(mj::plan_counts(right, cl, mode), profile.weights);

        std::vector<std::string> cells = {std::to_string(n), fmt(cost_l), fmt(cost_r),
                                          fmt(cost_r / cost_l)};
        if (measure) {
            mj::Database db = mj::generate_database(q, seed);
            mj::ExecOptions opt;
            opt.workers = workers;
            const double tl =
                mj::execute_plan(mj::NamedPlan{"L", left}, db, opt).total_seconds;
            const double tr =
                mj::execute_plan(mj::NamedPlan{"R", right}, db, opt).total_seconds;
            cells.push_back(fmt(tl));
            cells.push_back(fmt(tr));
        }
        csv.row(cells);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memory I/O cost toolkit for multi-join hash query plans"};
    app.require_subcommand(1);

    std::string config_path, profile_path, out_path, label = "host", baseline;
    std::string predicted_path, measured_path, sw_mode_name = "table";
    unsigned workers = 0;
    int reps = 10, max_joins = 9;
    double scale = 1.0, ratio = 4.0;
    std::uint64_t seed = 0, array_bytes = 1ull << 26, base_cardinality = 16'000'000;
    bool check = false, skip_oracle = false, measure = false;

    CLI::App* boot = app.add_subcommand("bootstrap", "calibrate this host's machine profile");
    boot->add_option("--out", out_path, "profile output path")->default_val("machine_profile.json");
    boot->add_option("--label", label, "profile label");
    boot->add_option("--workers", workers, "worker threads (0 = all)");
    boot->add_option("--reps", reps, "repetitions per microbenchmark")->default_val(10);
    boot->add_option("--array-bytes", array_bytes, "per-worker array bytes (power of two)");
    boot->add_option("--seed", seed, "rng seed");
    boot->add_flag("--check", check, "run twice and report weight repeatability");

    CLI::App* enumerate = app.add_subcommand("enumerate", "list all plans for a chain query");
    enumerate->add_option("--config", config_path, "experiment config JSON")->required();
    enumerate->add_option("--scale", scale, "cardinality scale factor");
    enumerate->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* predict = app.add_subcommand("predict", "predict per-plan counts and cost");
    predict->add_option("--config", config_path, "experiment config JSON")->required();
    predict->add_option("--profile", profile_path, "machine profile JSON")->required();
    predict->add_option("--scale", scale, "cardinality scale factor");
    predict->add_option("--sw-mode", sw_mode_name, "sw term: 'table' or 'literal'");
    predict->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* run = app.add_subcommand("run", "execute every plan and measure it");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--scale", scale, "cardinality scale factor");
    run->add_option("--reps", reps, "repetitions per plan (0 = config value, default 10)")
        ->default_val(0);
    run->add_option("--workers", workers, "worker threads (overrides config)");
    run->add_option("--seed", seed, "data generation seed (overrides config)");
    run->add_option("--sw-mode", sw_mode_name, "oracle sw term: 'table' or 'literal'");
    run->add_flag("--skip-oracle", skip_oracle, "skip the software access-count oracle");
    run->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* compare = app.add_subcommand("compare", "accuracy report: predictions vs runs");
    compare->add_option("--predicted", predicted_path, "CSV from 'predict'")->required();
    compare->add_option("--measured", measured_path, "CSV from 'run'")->required();
    compare->add_option("--baseline", baseline, "baseline plan for slowdown columns");
    compare->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* pipeline =
        app.add_subcommand("pipeline", "left- vs right-deep cost as joins increase");
    pipeline->add_option("--profile", profile_path, "machine profile JSON")->required();
    pipeline->add_option("--max-joins", max_joins, "largest join count")->default_val(9);
    pipeline->add_option("--base-cardinality", base_cardinality, "cardinality of R_0");
    pipeline->add_option("--ratio", ratio, "cardinality ratio between adjacent relations");
    pipeline->add_option("--sw-mode", sw_mode_name, "sw term: 'table' or 'literal'");
    pipeline->add_flag("--measure", measure, "also execute both plans per join count");
    pipeline->add_option("--workers", workers, "worker threads for --measure");
    pipeline->add_option("--seed", seed, "data generation seed for --measure");
    pipeline->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (boot->parsed())
            return cmd_bootstrap(out_path, label, workers, reps, array_bytes,
                                 seed == 0 ? 1 : seed, check);
        if (enumerate->parsed())
            return cmd_enumerate(mj::load_config(config_path), scale, out_path);
        if (predict->parsed())
            return cmd_predict(mj::load_config(config_path), mj::load_profile(profile_path),
                               scale, parse_sw_mode(sw_mode_name), out_path);
        if (run->parsed())
            return cmd_run(mj::load_config(config_path), scale, reps, workers, seed,
                           skip_oracle, parse_sw_mode(sw_mode_name), out_path);
        if (compare->parsed())
            return cmd_compare(predicted_path, measured_path, baseline, out_path);
        if (pipeline->parsed())
            return cmd_pipeline(max_joins, base_cardinality, ratio,
                                mj::load_profile(profile_path), parse_sw_mode(sw_mode_name),
                                measure, workers, seed == 0 ? 1 : seed, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
