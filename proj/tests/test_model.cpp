#include "memjoin/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "memjoin/plan_space.hpp"

using namespace memjoin;
using namespace memjoin::testing;

namespace {

constexpr std::uint64_t CL = 64;

HashTableSpec table4_spec(std::uint64_t cardinality) {
    return HashTableSpec::sized_for(cardinality, 512 * kMillion, 16, 16);
}

/// Closed-form inputs matching make_{left,right}_deep_plan over `q`.
struct ChainInputs {
    std::vector<RelationStats> intermediates;
    std::vector<HashTableSpec> specs_left, specs_right;
};

ChainInputs chain_inputs(const ChainQuery& q) {
    const std::size_t n = q.relation_count() - 1;
    ChainInputs in;
    for (std::size_t j = 1; j < n; ++j)
        in.intermediates.push_back(
            RelationStats{q.range_output_cardinality(0, j), q.intermediate_width});
    for (std::size_t j = 0; j < n; ++j) {
        const RelationStats& build = q.relations[j + 1];
        in.specs_right.push_back(HashTableSpec::sized_for(
            build.cardinality, q.sizing.bucket_count_for(build.cardinality),
            q.sizing.header_bytes, build.tuple_width));
    }
    // Left-deep builds R_n first, then each intermediate over [n-j..n].
    in.specs_left.push_back(HashTableSpec::sized_for(
        q.relations[n].cardinality, q.sizing.bucket_count_for(q.relations[n].cardinality),
        q.sizing.header_bytes, q.relations[n].tuple_width));
    for (std::size_t j = 1; j < n; ++j) {
        const std::uint64_t card = q.range_output_cardinality(n - j, n);
        in.specs_left.push_back(HashTableSpec::sized_for(
            card, q.sizing.bucket_count_for(card), q.sizing.header_bytes,
            q.intermediate_width));
    }
    return in;
}

std::vector<RelationStats> left_deep_intermediates(const ChainQuery& q) {
    const std::size_t n = q.relation_count() - 1;
    std::vector<RelationStats> inter;
    for (std::size_t j = 1; j < n; ++j)
        inter.push_back(RelationStats{q.range_output_cardinality(n - j, n),
                                      q.intermediate_width});
    return inter;
}

}  // namespace

TEST_CASE("scan counts") {
    CHECK(scan_counts({512 * kMillion, 16}, CL).sr == 128 * kMillion);  // Table 4, Scan(R)
    CHECK(scan_counts({0, 16}, CL) == AccessCounts{});
    CHECK(scan_counts({3, 100}, CL).sr == 5);  // ceil(300/64)
    CHECK(scan_counts({3, 100}, CL).rr == 0);
}

TEST_CASE("bucket write events match the byte-interval oracle") {
    CHECK(bucket_write_events(1, 16, 64) == 1);
    CHECK(bucket_write_events(5, 48, 64) == overlap_pair_count(5, 48, 64));
    CHECK(bucket_write_events(5, 48, 64) == 7);
    CHECK(bucket_write_events(5, 16, 64) == 5);  // lcm(16,64)=64 makes k2 == k3
    CHECK(bucket_write_events(0, 16, 64) == 0);

    for (const std::uint64_t cl : {64, 128})
        for (const std::uint64_t w : {4, 8, 12, 16, 24, 48, 100})
            for (std::uint64_t t = 1; t <= 64; ++t)
                CHECK(bucket_write_events(t, w, cl) == overlap_pair_count(t, w, cl));
}

TEST_CASE("build counts reproduce the load-factor table") {
    //(load factor, rw, sw) in millions, TableConsistent.
    const struct {
        std::uint64_t load, rw, sw;
    } rows[] = {{1, 512, 0},    {2, 1024, 0},   {3, 1536, 0},   {4, 2048, 512},
                {5, 2560, 1024}, {6, 3072, 1536}, {7, 3584, 2048}, {8, 4096, 2560}};
    for (const auto& row : rows) {
        const RelationStats rel{row.load * 512 * kMillion, 16};
        const AccessCounts c =
            build_counts(rel, table4_spec(rel.cardinality), CL, SwMode::TableConsistent);
        CHECK(c.rw == row.rw * kMillion);
        CHECK(c.sw == row.sw * kMillion);
        CHECK(c.rr == 0);
        CHECK(c.sr == 0);
    }
}

TEST_CASE("literal mode applies the packing formula to every tuple") {
    const RelationStats rel{2048 * kMillion, 16};
    const AccessCounts c = build_counts(rel, table4_spec(rel.cardinality), CL, SwMode::LiteralEq7);
    CHECK(c.sw == 2048 * kMillion);  // M(4,16) = 4 per bucket, all four tuples counted
    CHECK(build_counts(rel, table4_spec(rel.cardinality), CL, SwMode::TableConsistent).sw ==
          512 * kMillion);
}

TEST_CASE("build counts reject inconsistent specs") {
    const RelationStats rel{100, 16};
    HashTableSpec bad = HashTableSpec::sized_for(100, 16, 16, 16);
    bad.tuples_per_bucket = 1;
    CHECK_THROWS_AS(build_counts(rel, bad, CL, SwMode::TableConsistent), std::invalid_argument);
}

TEST_CASE("extra probe lines") {
    CHECK(extra_probe_lines(HashTableSpec::sized_for(1, 1, 16, 16), CL) == 0);   // T=1
    CHECK(extra_probe_lines(HashTableSpec::sized_for(3, 1, 16, 16), CL) == 0);   // exactly 1 line
    CHECK(extra_probe_lines(HashTableSpec::sized_for(4, 1, 16, 16), CL) == 1);   // ceil(80/64)-1
}

TEST_CASE("probe counts") {
    const HashTableSpec one_per_bucket = table4_spec(512 * kMillion);
    const AccessCounts c = probe_counts({2048 * kMillion, 16}, one_per_bucket, CL);
    CHECK(c.rr == 2048 * kMillion);  // Table 5, 4x row Probe(S)
    CHECK(c.sr == 0);
    CHECK(probe_counts({0, 16}, one_per_bucket, CL) == AccessCounts{});

    const HashTableSpec deep = HashTableSpec::sized_for(4, 1, 16, 16);  // L = 1
    const AccessCounts d = probe_counts({1000, 16}, deep, CL);
    CHECK(d.rr == 1000);
    CHECK(d.sr == 1000);
}

TEST_CASE("plan counts: single scan is the base case") {
    const PlanNode scan = PlanNode::scan(0, {512 * kMillion, 16});
    CHECK(plan_counts(scan, CL, SwMode::TableConsistent) ==
          scan_counts({512 * kMillion, 16}, CL));
}

TEST_CASE("plan counts: one join reproduces the selectivity-table baseline row") {
    ChainQuery q;
    q.relations = {{512 * kMillion, 16}, {512 * kMillion, 16}};
    q.joins.resize(1);
    q.sizing.policy = TableSizing::Policy::FixedCount;
    q.sizing.fixed_count = 512 * kMillion;
    // Build on R_1, probe R_0.
    PlanNode plan = propagate_cardinalities(
        PlanNode::hash_join(PlanNode::scan(1, {}), PlanNode::scan(0, {}), {}, {}), q);
    const AccessCounts c = plan_counts(plan, CL, SwMode::TableConsistent);
    CHECK(c.rw == 512 * kMillion);
    CHECK(c.rr == 512 * kMillion);
    CHECK(c.sr == 256 * kMillion);  // both scans
    CHECK(c.sw == 0);
    CHECK(c.total() == 1280 * kMillion);
    CHECK(c.total_reads() == 1280 * kMillion);
    CHECK(c.total_writes() == 512 * kMillion);
}

TEST_CASE("access count mapping matches the observed-I/O columns") {
    // Load factor 4.0 row: total reads 3,072 = 512 (scan) + 2,048 (rw) + 512 (sw).
    AccessCounts c;
    c.sr = 512 * kMillion;
    c.rw = 2048 * kMillion;
    c.sw = 512 * kMillion;
    CHECK(c.total_reads() == 3072 * kMillion);
    CHECK(c.total_writes() == 2560 * kMillion);
}

TEST_CASE("predicted slowdowns match the reported ratios") {
    const WeightVector w = intel_weights();

    // Build-side table, loads 1..8.
    std::vector<double> build_cost;
    for (std::uint64_t load = 1; load <= 8; ++load) {
        const RelationStats rel{load * 512 * kMillion, 16};
        AccessCounts c = build_counts(rel, table4_spec(rel.cardinality), CL,
                                      SwMode::TableConsistent);
        c += scan_counts(rel, CL);
        build_cost.push_back(predicted_cost(c, w));
    }
    const double build_expect[] = {2.00, 3.00, 4.77, 6.55, 8.32, 10.09, 11.87};
    for (std::size_t i = 0; i < 7; ++i)
        CHECK(std::abs(build_cost[i + 1] / build_cost[0] - build_expect[i]) < 0.01);

    // Probe-side table: |S|/|R| multiples 4,3,2 then 2,4,6,8, vs the 1x row.
    const RelationStats r{512 * kMillion, 16};
    const HashTableSpec spec = table4_spec(r.cardinality);
    auto row_cost = [&](std::uint64_t mult) {
        AccessCounts c = scan_counts(r, CL);
        c += build_counts(r, spec, CL, SwMode::TableConsistent);
        const RelationStats s{mult * 512 * kMillion, 16};
        c += scan_counts(s, CL);
        c += probe_counts(s, spec, CL);
        return predicted_cost(c, w);
    };
    const double base = row_cost(1);
    const std::uint64_t mults[] = {4, 3, 2, 2, 4, 6, 8};
    const double probe_expect[] = {2.15, 1.77, 1.38, 1.38, 2.15, 2.92, 3.68};
    for (std::size_t i = 0; i < 7; ++i)
        CHECK(std::abs(row_cost(mults[i]) / base - probe_expect[i]) < 0.01);
}

TEST_CASE("closed forms agree with the tree recursion") {
    SUBCASE("two relations: the trees coincide") {
        ChainQuery q;
        q.relations = {{1000, 16}, {500, 16}};
        q.joins.resize(1);
        const ChainInputs in = chain_inputs(q);
        const AccessCounts r = right_deep_closed_form(q.relations, in.intermediates,
                                                      in.specs_right, CL,
                                                      SwMode::TableConsistent);
        CHECK(r == plan_counts(make_right_deep_plan(q), CL, SwMode::TableConsistent));
        const AccessCounts l = left_deep_closed_form(q.relations, left_deep_intermediates(q),
                                                     in.specs_left, CL,
                                                     SwMode::TableConsistent);
        CHECK(l == plan_counts(make_left_deep_plan(q), CL, SwMode::TableConsistent));
    }

    SUBCASE("the 4-relation 1:4 chain") {
        const ChainQuery q = paper_chain();
        const ChainInputs in = chain_inputs(q);
        CHECK(right_deep_closed_form(q.relations, in.intermediates, in.specs_right, CL,
                                     SwMode::TableConsistent) ==
              plan_counts(make_right_deep_plan(q), CL, SwMode::TableConsistent));
        CHECK(left_deep_closed_form(q.relations, left_deep_intermediates(q), in.specs_left,
                                    CL, SwMode::TableConsistent) ==
              plan_counts(make_left_deep_plan(q), CL, SwMode::TableConsistent));
        // N(rr) closed forms: n*|R_0| right-deep, sum of probed relations left-deep.
        CHECK(plan_counts(make_right_deep_plan(q), CL, SwMode::TableConsistent).rr ==
              3 * 2048 * kMillion);
        CHECK(plan_counts(make_left_deep_plan(q), CL, SwMode::TableConsistent).rr ==
              (2048 + 512 + 128) * kMillion);
    }

    SUBCASE("randomized chains, both sw modes and sizing policies") {
        std::mt19937_64 rng(41);
        for (int round = 0; round < 60; ++round) {
            ChainQuery q;
            const std::size_t rels = 2 + rng() % 7;
            for (std::size_t i = 0; i < rels; ++i)
                q.relations.push_back(RelationStats{1 + rng() % 10'000'000, 16});
            q.joins.resize(rels - 1);
            if (round % 2) {
                q.sizing.policy = TableSizing::Policy::FixedCount;
                q.sizing.fixed_count = 1 + rng() % 100'000;
            }
            const SwMode mode = round % 3 ? SwMode::TableConsistent : SwMode::LiteralEq7;
            const ChainInputs in = chain_inputs(q);
            CHECK(right_deep_closed_form(q.relations, in.intermediates, in.specs_right, CL,
                                         mode) ==
                  plan_counts(make_right_deep_plan(q), CL, mode));
            CHECK(left_deep_closed_form(q.relations, left_deep_intermediates(q), in.specs_left,
                                        CL, mode) ==
                  plan_counts(make_left_deep_plan(q), CL, mode));
        }
    }

    SUBCASE("length mismatch is rejected") {
        const ChainQuery q = paper_chain();
        const ChainInputs in = chain_inputs(q);
        CHECK_THROWS_AS(right_deep_closed_form(q.relations, {}, in.specs_right, CL,
                                               SwMode::TableConsistent),
                        std::invalid_argument);
    }
}

TEST_CASE("write parity between deep trees on PK-FK chains") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 40; ++round) {
        ChainQuery q;
        const std::size_t rels = 2 + rng() % 6;
        for (std::size_t i = 0; i < rels; ++i)
            q.relations.push_back(RelationStats{1 + rng() % 1'000'000, 16});
        q.joins.resize(rels - 1);
        q.sizing.policy = TableSizing::Policy::FixedCount;
        q.sizing.fixed_count = 4096;  // multi-tuple buckets so sw is nonzero
        const AccessCounts l = plan_counts(make_left_deep_plan(q), CL, SwMode::TableConsistent);
        const AccessCounts r = plan_counts(make_right_deep_plan(q), CL, SwMode::TableConsistent);
        CHECK(l.rw + l.sw == r.rw + r.sw);
        CHECK(l.rw == r.rw);
        CHECK(l.sw == r.sw);
    }
}

TEST_CASE("rr gap between deep trees") {
    SUBCASE("reported geometry") {
        std::vector<RelationStats> ascending = {
            {32 * kMillion, 16}, {128 * kMillion, 16}, {512 * kMillion, 16},
            {2048 * kMillion, 16}};
        CHECK(insight_rr_gap(ascending) == 3456ll * 1'000'000);
        const ChainQuery q = paper_chain();
        const AccessCounts l = plan_counts(make_left_deep_plan(q), CL, SwMode::TableConsistent);
        const AccessCounts r = plan_counts(make_right_deep_plan(q), CL, SwMode::TableConsistent);
        CHECK(static_cast<std::int64_t>(r.rr - l.rr) == insight_rr_gap(ascending));
    }
    SUBCASE("degenerate cases") {
        std::vector<RelationStats> equal = {{100, 16}, {100, 16}, {100, 16}};
        CHECK(insight_rr_gap(equal) == 0);
        std::vector<RelationStats> two = {{50, 16}, {70, 16}};
        CHECK(insight_rr_gap(two) == 0);
        std::vector<RelationStats> unsorted = {{70, 16}, {50, 16}};
        CHECK_THROWS_AS(insight_rr_gap(unsorted), std::invalid_argument);
    }
    SUBCASE("random PK-FK chains, gap is nonnegative and matches the plans") {
        std::mt19937_64 rng(11);
        for (int round = 0; round < 40; ++round) {
            const std::size_t rels = 2 + rng() % 6;
            std::vector<std::uint64_t> cards(rels);
            for (auto& c : cards) c = 1 + rng() % 1'000'000;
            std::sort(cards.begin(), cards.end(), std::greater<>());  // chain order: descending
            ChainQuery q;
            for (std::uint64_t c : cards) q.relations.push_back(RelationStats{c, 16});
            q.joins.resize(rels - 1);
            std::vector<RelationStats> ascending(q.relations.rbegin(), q.relations.rend());
            const std::int64_t gap = insight_rr_gap(ascending);
            CHECK(gap >= 0);
            const AccessCounts l =
                plan_counts(make_left_deep_plan(q), CL, SwMode::TableConsistent);
            const AccessCounts r =
                plan_counts(make_right_deep_plan(q), CL, SwMode::TableConsistent);
            CHECK(static_cast<std::int64_t>(r.rr) - static_cast<std::int64_t>(l.rr) == gap);
        }
    }
}

TEST_CASE("plan counts grow monotonically with any cardinality") {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 30; ++round) {
        ChainQuery q;
        const std::size_t rels = 2 + rng() % 4;
        for (std::size_t i = 0; i < rels; ++i)
            q.relations.push_back(RelationStats{1 + rng() % 100'000, 16});
        q.joins.resize(rels - 1);
        if (round % 2) {
            q.sizing.policy = TableSizing::Policy::FixedCount;
            q.sizing.fixed_count = 1024;
        }
        for (const NamedPlan& plan : enumerate_plans(q)) {
            const AccessCounts before = plan_counts(plan.plan, CL, SwMode::TableConsistent);
            ChainQuery grown = q;
            const std::size_t which = rng() % rels;
            grown.relations[which].cardinality += 1 + rng() % 1000;
            const PlanNode regrown = propagate_cardinalities(plan.plan, grown);
            const AccessCounts after = plan_counts(regrown, CL, SwMode::TableConsistent);
            CHECK(after.sr >= before.sr);
            CHECK(after.rr >= before.rr);
            CHECK(after.sw >= before.sw);
            CHECK(after.rw >= before.rw);
        }
    }
}

TEST_CASE("predicted cost is linear and scale-invariant in its ranking") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 200; ++round) {
        const AccessCounts a{rng() % 1'000'000, rng() % 1'000'000, rng() % 1'000'000,
                             rng() % 1'000'000};
        const AccessCounts b{rng() % 1'000'000, rng() % 1'000'000, rng() % 1'000'000,
                             rng() % 1'000'000};
        const WeightVector w{1.0, 0.5 + (rng() % 1000) / 100.0, 0.5 + (rng() % 1000) / 100.0,
                             0.5 + (rng() % 1000) / 100.0};
        CHECK(predicted_cost(a + b, w) ==
              doctest::Approx(predicted_cost(a, w) + predicted_cost(b, w)).epsilon(1e-12));

        // Scaling all weights preserves the order of any two costs.
        const double k = 0.01 + (rng() % 10000) / 100.0;
        const WeightVector scaled{w.sr * k, w.rr * k, w.sw * k, w.rw * k};
        const double d1 = predicted_cost(a, w) - predicted_cost(b, w);
        const double d2 = predicted_cost(a, scaled) - predicted_cost(b, scaled);
        CHECK(((d1 > 0) == (d2 > 0) || d1 == 0 || d2 == 0));
    }
}

TEST_CASE("the reference-weight ranking puts both left-deep champions first") {
    const ChainQuery q = paper_chain();
    std::vector<std::pair<double, std::string>> ranked;
    for (const NamedPlan& p : enumerate_plans(q))
        ranked.emplace_back(
            predicted_cost(plan_counts(p.plan, CL, SwMode::TableConsistent), intel_weights()),
            p.name);
    std::sort(ranked.begin(), ranked.end());
    CHECK(ranked[0].second == "L3210");
    CHECK(ranked[1].second == "L2310");
}

TEST_CASE("access count arithmetic") {
    const AccessCounts a{1, 2, 3, 4}, b{10, 20, 30, 40}, c{5, 6, 7, 8};
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
}

TEST_CASE("weight normalization") {
    const WeightVector raw{2.0, 8.0, 10.0, 13.0};
    const WeightVector w = raw.normalized();
    CHECK(w.sr == 1.0);
    CHECK(w.rr == doctest::Approx(4.0));
    CHECK(w.sw == doctest::Approx(5.0));
    CHECK(w.rw == doctest::Approx(6.5));
    CHECK_THROWS_AS((WeightVector{0, 1, 1, 1}.normalized()), std::invalid_argument);
}
