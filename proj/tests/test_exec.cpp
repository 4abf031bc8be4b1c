#include "memjoin/executor.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "memjoin/relation.hpp"

using namespace memjoin;
using namespace memjoin::testing;

namespace {

ChainQuery test_chain(std::vector<std::uint64_t> cards, JoinSpec spec = {}) {
    ChainQuery q;
    for (std::uint64_t c : cards) q.relations.push_back(RelationStats{c, 16});
    q.joins.assign(cards.size() - 1, spec);
    return q;
}

}  // namespace

TEST_CASE("relation generation is deterministic and well-formed") {
    const JoinSpec spec;
    const Relation a = generate_relation(8, 8, spec, 7);
    const Relation b = generate_relation(8, 8, spec, 7);
    CHECK(a.key == b.key);
    CHECK(a.ref == b.ref);
    const Relation c = generate_relation(8, 8, spec, 8);
    CHECK(a.key != c.key);

    // Attribute a is a permutation of 1..n.
    Relation big = generate_relation(10'000, 10'000, spec, 3);
    std::vector<std::uint64_t> sorted = big.key;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint64_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i + 1);
}

TEST_CASE("1:4 ratio references every key exactly four times") {
    const std::uint64_t keys = 2500;
    const Relation r = generate_relation(4 * keys, keys, JoinSpec{}, 5);
    std::map<std::uint64_t, int> histogram;
    for (std::uint64_t v : r.ref) histogram[v]++;
    CHECK(histogram.size() == keys);
    for (const auto& [key, count] : histogram) {
        CHECK(key >= 1);
        CHECK(key <= keys);
        CHECK(count == 4);
    }
}

TEST_CASE("25% selectivity references exactly a quarter of the tuples") {
    const std::uint64_t card = 10'000, keys = 2'500;
    JoinSpec spec;
    spec.match_probability = 0.25;
    const Relation r = generate_relation(card, keys, spec, 6);
    std::set<std::uint64_t> referenced;
    std::uint64_t matched = 0;
    for (std::uint64_t v : r.ref) {
        if (v <= keys) {
            referenced.insert(v);
            ++matched;
        }
    }
    CHECK(referenced.size() == (card + 3) / 4);  // exactly ceil(card/4) distinct keys
    CHECK(matched == card / 4);
}

TEST_CASE("zipf references are skewed toward low ranks") {
    JoinSpec spec;
    spec.zipf_factor = 1.0;
    const Relation r = generate_relation(50'000, 1'000, spec, 9);
    std::map<std::uint64_t, std::uint64_t> histogram;
    for (std::uint64_t v : r.ref) {
        CHECK(v >= 1);
        CHECK(v <= 1'000);
        histogram[v]++;
    }
    CHECK(histogram[1] > histogram[100]);
    CHECK(histogram[1] > 50'000 / 1'000 * 4);  // far above the uniform share

    JoinSpec bad;
    bad.zipf_factor = -1.0;
    CHECK_THROWS_AS(generate_relation(10, 10, bad, 1), std::invalid_argument);
}

TEST_CASE("hash table occupancy under identity-mod hashing") {
    SUBCASE("unique dense keys with one slot per bucket: no chains") {
        const std::uint64_t n = 1 << 16;
        HashTable table(HashTableSpec::sized_for(n, n, 16, 16), HashMode::IdentityMod);
        for (std::uint64_t k = 1; k <= n; ++k) table.insert(k, k + 100);
        CHECK(table.overflow_nodes() == 0);
        for (std::uint64_t b = 0; b < n; ++b) CHECK(table.occupancy(b) == 1);
        std::uint64_t hits = 0;
        table.for_each_match(17, [&](std::uint64_t payload) {
            CHECK(payload == 117);
            ++hits;
        });
        CHECK(hits == 1);
    }
    SUBCASE("load factor four with exact sizing: every bucket holds four") {
        const std::uint64_t n = 4096, buckets = n / 4;
        HashTable table(HashTableSpec::sized_for(n, buckets, 16, 16), HashMode::IdentityMod);
        for (std::uint64_t k = 1; k <= n; ++k) table.insert(k, k);
        CHECK(table.overflow_nodes() == 0);
        for (std::uint64_t b = 0; b < buckets; ++b) CHECK(table.occupancy(b) == 4);
    }
    SUBCASE("empty build") {
        HashTable table(HashTableSpec::sized_for(0, 1, 16, 16), HashMode::IdentityMod);
        std::uint64_t hits = 0;
        table.for_each_match(1, [&](std::uint64_t) { ++hits; });
        CHECK(hits == 0);
    }
}

TEST_CASE("parallel builds agree with serial builds") {
    const std::uint64_t n = 200'000;
    const Relation rel = generate_relation(n, n, JoinSpec{}, 12);
    const HashTableSpec spec = HashTableSpec::sized_for(n, n / 2, 16, 16);
    const auto serial = build_hash_table(rel, false, spec, HashMode::Multiplicative, 1);
    const auto parallel = build_hash_table(rel, false, spec, HashMode::Multiplicative, 8);
    // Same occupancy everywhere, and no tuple lost under contention.
    for (std::uint64_t b = 0; b < spec.bucket_count; ++b)
        CHECK(serial->occupancy(b) == parallel->occupancy(b));
    CHECK(serial->overflow_nodes() == parallel->overflow_nodes());
    for (std::uint64_t k = 1; k <= n; k += 97) {
        std::uint64_t hits = 0, expect_payload = 0;
        parallel->for_each_match(k, [&](std::uint64_t payload) {
            expect_payload = payload;
            ++hits;
        });
        CHECK(hits == 1);
        CHECK(expect_payload == rel.ref[std::find(rel.key.begin(), rel.key.end(), k) -
                                        rel.key.begin()]);
    }
}

TEST_CASE("hash table chains keep every tuple reachable") {
    // Multiplicative hashing with tight sizing collides; chaining must hold
    // all tuples anyway.
    const std::uint64_t n = 4096;
    HashTable table(HashTableSpec::sized_for(n, n, 16, 16), HashMode::Multiplicative);
    for (std::uint64_t k = 1; k <= n; ++k) table.insert(k, 3 * k);
    CHECK(table.overflow_nodes() > 0);
    for (std::uint64_t k = 1; k <= n; ++k) {
        std::uint64_t hits = 0;
        table.for_each_match(k, [&](std::uint64_t payload) {
            CHECK(payload == 3 * k);
            ++hits;
        });
        CHECK(hits == 1);
    }
}

TEST_CASE("single join matches the nested-loop reference") {
    const ChainQuery q = test_chain({10'000, 10'000});
    const Database db = generate_database(q, 21);
    const ReferenceResult expected = reference_join(db);
    CHECK(expected.cardinality == 10'000);  // identity fanout

    for (const NamedPlan& plan : enumerate_plans(q)) {
        const ExecutionReport report = execute_plan(plan, db, ExecOptions{2});
        CHECK(report.output_cardinality == expected.cardinality);
        CHECK(report.aggregate == expected.aggregate);
    }
}

TEST_CASE("every enumerated plan returns the reference result") {
    const std::uint64_t base = 4000;
    std::vector<ChainQuery> configs;
    configs.push_back(test_chain({base, base / 4, base / 16, base / 64}));
    {
        JoinSpec quarter;
        quarter.match_probability = 0.25;
        configs.push_back(test_chain({base, base / 4, base / 16, base / 64}, quarter));
    }
    {
        JoinSpec zipf;
        zipf.zipf_factor = 1.0;
        configs.push_back(test_chain({base, base / 4, base / 16, base / 64}, zipf));
    }
    for (const ChainQuery& q : configs) {
        const Database db = generate_database(q, 33);
        const ReferenceResult expected = reference_join(db);
        std::set<std::uint64_t> aggregates;
        for (const NamedPlan& plan : enumerate_plans(q)) {
            const ExecutionReport report = execute_plan(plan, db, ExecOptions{2});
            CHECK(report.output_cardinality == expected.cardinality);
            CHECK(report.aggregate == expected.aggregate);
            aggregates.insert(report.aggregate);
        }
        CHECK(aggregates.size() == 1);  // plan-order independence
    }
}

TEST_CASE("25% match probability yields exactly a quarter of the probes") {
    ChainQuery q = test_chain({8'000, 2'000});
    q.joins[0].match_probability = 0.25;
    const Database db = generate_database(q, 13);
    const NamedPlan plan{"join", propagate_cardinalities(
                                     PlanNode::hash_join(PlanNode::scan(1, {}),
                                                         PlanNode::scan(0, {}), {}, {}),
                                     q)};
    const ExecutionReport report = execute_plan(plan, db, ExecOptions{2});
    CHECK(report.output_cardinality == 2'000);
}

TEST_CASE("results are identical across worker counts") {
    const ChainQuery q = test_chain({5'000, 1'250, 312});
    const Database db = generate_database(q, 44);
    std::vector<NamedPlan> plans = enumerate_plans(q);
    for (const NamedPlan& plan : {plans.front(), plans.back()}) {
        const ExecutionReport one = execute_plan(plan, db, ExecOptions{1});
        const ExecutionReport two = execute_plan(plan, db, ExecOptions{2});
        const ExecutionReport five = execute_plan(plan, db, ExecOptions{5});
        CHECK(one.aggregate == two.aggregate);
        CHECK(two.aggregate == five.aggregate);
        CHECK(one.output_cardinality == two.output_cardinality);
        CHECK(two.output_cardinality == five.output_cardinality);
    }
}

TEST_CASE("execution reports account for phases and memory") {
    const ChainQuery q = test_chain({4'000, 1'000, 250, 62});
    const Database db = generate_database(q, 55);
    const NamedPlan plan{"L3210", make_left_deep_plan(q)};
    const ExecutionReport report = execute_plan(plan, db, ExecOptions{2});
    CHECK(report.phases.size() == 4);  // three builds plus the final probe
    double sum = 0;
    for (const PhaseTime& p : report.phases) sum += p.seconds;
    CHECK(sum <= report.total_seconds + 1e-9);
    CHECK(report.peak_bytes > 0);
}

TEST_CASE("prefetch flag changes no results") {
    const ChainQuery q = test_chain({20'000, 5'000});
    const Database db = generate_database(q, 66);
    const NamedPlan plan{"R10", make_right_deep_plan(q)};
    ExecOptions plain{2};
    ExecOptions peek{2};
    peek.prefetch = true;
    CHECK(execute_plan(plan, db, plain).aggregate == execute_plan(plan, db, peek).aggregate);
}

TEST_CASE("generated databases are fixed at 16-byte tuples") {
    ChainQuery q = test_chain({100, 100});
    q.relations[0].tuple_width = 32;
    CHECK_THROWS_AS(generate_database(q, 1), std::invalid_argument);
}

TEST_CASE("plans referencing unknown relations are rejected") {
    const ChainQuery q = test_chain({100, 100});
    Database db = generate_database(q, 1);
    db.pop_back();
    const NamedPlan plan{"bad", make_right_deep_plan(q)};
    CHECK_THROWS(execute_plan(plan, db, ExecOptions{1}));
}
