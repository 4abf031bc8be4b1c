#include "memjoin/plan_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace memjoin {

std::uint64_t TableSizing::bucket_count_for(std::uint64_t cardinality) const {
    switch (policy) {
        case Policy::Pow2AtLeastCard:
            return std::bit_ceil(std::max<std::uint64_t>(cardinality, 1));
        case Policy::ExactCard:
            return std::max<std::uint64_t>(cardinality, 1);
        case Policy::FixedCount:
            if (fixed_count == 0) throw std::invalid_argument("fixed bucket count is zero");
            return fixed_count;
        case Policy::CardOverLoad: {
            if (load_factor <= 0) throw std::invalid_argument("load factor must be positive");
            const auto buckets = static_cast<std::uint64_t>(
                std::ceil(static_cast<double>(cardinality) / load_factor));
            return std::max<std::uint64_t>(buckets, 1);
        }
    }
    return 1;
}

void ChainQuery::validate() const {
    if (relations.size() < 2)
        throw std::invalid_argument("chain query needs at least two relations");
    if (joins.size() != relations.size() - 1)
        throw std::invalid_argument("chain query needs one join spec per adjacent pair");
    for (const RelationStats& r : relations)
        if (r.tuple_width == 0) throw std::invalid_argument("tuple width must be >= 1");
    for (const JoinSpec& j : joins)
        if (!j.valid()) throw std::invalid_argument("invalid join spec");
    if (intermediate_width == 0)
        throw std::invalid_argument("intermediate width must be >= 1");
}

std::uint64_t ChainQuery::range_output_cardinality(std::size_t lo, std::size_t hi) const {
    if (hi >= relations.size() || lo > hi)
        throw std::invalid_argument("relation range out of bounds");
    double card = static_cast<double>(relations[lo].cardinality);
    for (std::size_t e = lo; e < hi; ++e)
        card *= joins[e].match_probability * joins[e].fanout;
    return static_cast<std::uint64_t>(std::llround(card));
}

namespace {

struct LeafRange {
    std::size_t lo, hi;
};

/// Leaf set of `p` as a contiguous range; throws otherwise. Leaves may appear
/// in any order within the subtree, but together they must cover [lo, hi]
/// exactly once.
LeafRange leaf_range(const PlanNode& p, const ChainQuery& q) {
    std::vector<int> ids;
    std::function<void(const PlanNode&)> collect = [&](const PlanNode& n) {
        if (n.is_scan()) {
            ids.push_back(n.relation_id());
            return;
        }
        collect(n.build());
        collect(n.probe());
    };
    collect(p);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i + 1 < ids.size(); ++i)
        if (ids[i + 1] != ids[i] + 1)
            throw std::invalid_argument("plan leaves are not a contiguous relation range");
    if (ids.front() < 0 || static_cast<std::size_t>(ids.back()) >= q.relation_count())
        throw std::invalid_argument("plan references unknown relation");
    return {static_cast<std::size_t>(ids.front()), static_cast<std::size_t>(ids.back())};
}

PlanNode annotate(const PlanNode& p, const ChainQuery& q, LeafRange* out_range) {
    if (p.is_scan()) {
        const auto id = static_cast<std::size_t>(p.relation_id());
        if (p.relation_id() < 0 || id >= q.relation_count())
            throw std::invalid_argument("plan references unknown relation");
        if (out_range) *out_range = {id, id};
        return PlanNode::scan(p.relation_id(), q.relations[id]);
    }
    LeafRange br{}, pr{};
    PlanNode build = annotate(p.build(), q, &br);
    PlanNode probe = annotate(p.probe(), q, &pr);
    LeafRange all{std::min(br.lo, pr.lo), std::max(br.hi, pr.hi)};
    const bool adjacent = br.hi + 1 == pr.lo || pr.hi + 1 == br.lo;
    if (!adjacent || all.hi - all.lo + 1 != (br.hi - br.lo + 1) + (pr.hi - pr.lo + 1))
        throw std::invalid_argument("plan leaves are not a contiguous relation range");
    if (out_range) *out_range = all;

    RelationStats output{q.range_output_cardinality(all.lo, all.hi), q.intermediate_width};
    const std::uint64_t build_card = build.output().cardinality;
    HashTableSpec table = HashTableSpec::sized_for(
        build_card, q.sizing.bucket_count_for(build_card), q.sizing.header_bytes,
        build.output().tuple_width);
    return PlanNode::hash_join(std::move(build), std::move(probe), table, output);
}

void enumerate_structures(std::size_t lo, std::size_t hi,
                          std::vector<PlanNode>& out) {
    if (lo == hi) {
        out.push_back(PlanNode::scan(static_cast<int>(lo), RelationStats{}));
        return;
    }
    for (std::size_t split = lo; split < hi; ++split) {
        std::vector<PlanNode> left, right;
        enumerate_structures(lo, split, left);
        enumerate_structures(split + 1, hi, right);
        for (const PlanNode& l : left)
            for (const PlanNode& r : right) {
                out.push_back(
                    PlanNode::hash_join(l, r, HashTableSpec{}, RelationStats{}));
                out.push_back(
                    PlanNode::hash_join(r, l, HashTableSpec{}, RelationStats{}));
            }
    }
}

void leaf_sequence(const PlanNode& p, std::string& out) {
    if (p.is_scan()) {
        out += std::to_string(p.relation_id());
        return;
    }
    leaf_sequence(p.build(), out);
    leaf_sequence(p.probe(), out);
}

void skeleton(const PlanNode& p, std::string& out) {
    if (p.is_scan()) {
        out += '.';
        return;
    }
    out += '(';
    skeleton(p.build(), out);
    skeleton(p.probe(), out);
    out += ')';
}

// The five 4-leaf tree shapes of the naming vocabulary, build side printed
// first (drawn on the left).
struct ShapeEntry {
    const char* letter;
    const char* skeleton;
};
constexpr ShapeEntry kShapes[] = {
    {"L", "(((..).).)"}, {"LB", "((.(..)).)"}, {"B", "((..)(..))"},
    {"RB", "(.((..).))"}, {"R", "(.(.(..)))"},
};

}  // namespace

std::uint64_t plan_space_size(std::size_t relations) {
    if (relations == 0) return 0;
    std::vector<std::uint64_t> t(relations + 1, 0);
    t[1] = 1;
    for (std::size_t m = 2; m <= relations; ++m)
        for (std::size_t a = 1; a < m; ++a) t[m] += 2 * t[a] * t[m - a];
    return t[relations];
}

std::vector<NamedPlan> enumerate_plans(const ChainQuery& q) {
    q.validate();
    std::vector<PlanNode> structures;
    enumerate_structures(0, q.relation_count() - 1, structures);
    std::vector<NamedPlan> plans;
    plans.reserve(structures.size());
    for (const PlanNode& s : structures) {
        PlanNode annotated = annotate(s, q, nullptr);
        std::string name = plan_name(annotated);
        plans.push_back(NamedPlan{std::move(name), std::move(annotated)});
    }
    return plans;
}

PlanNode propagate_cardinalities(const PlanNode& plan, const ChainQuery& q) {
    q.validate();
    leaf_range(plan, q);  // rejects non-contiguous leaf sets up front
    return annotate(plan, q, nullptr);
}

std::string plan_name(const PlanNode& plan) {
    if (plan.leaf_count() == 4) {
        std::string sk;
        skeleton(plan, sk);
        for (const ShapeEntry& s : kShapes)
            if (sk == s.skeleton) {
                std::string name = s.letter;
                leaf_sequence(plan, name);
                return name;
            }
    }
    return to_grammar(plan);
}

PlanNode make_left_deep_plan(const ChainQuery& q) {
    q.validate();
    const std::size_t n = q.relation_count() - 1;
    PlanNode node = PlanNode::scan(static_cast<int>(n), RelationStats{});
    for (std::size_t i = n; i-- > 0;) {
        PlanNode probe = PlanNode::scan(static_cast<int>(i), RelationStats{});
        node = PlanNode::hash_join(std::move(node), std::move(probe), HashTableSpec{},
                                   RelationStats{});
    }
    return propagate_cardinalities(node, q);
}

PlanNode make_right_deep_plan(const ChainQuery& q) {
    q.validate();
    PlanNode node = PlanNode::scan(0, RelationStats{});
    for (std::size_t i = 1; i < q.relation_count(); ++i) {
        PlanNode build = PlanNode::scan(static_cast<int>(i), RelationStats{});
        node = PlanNode::hash_join(std::move(build), std::move(node), HashTableSpec{},
                                   RelationStats{});
    }
    return propagate_cardinalities(node, q);
}

PlanNode parse_plan_name(std::string_view name, const ChainQuery& q) {
    if (name.starts_with("scan:") || name.starts_with("join("))
        return propagate_cardinalities(parse_grammar(name), q);

    // Longest letter prefix first so "LB"/"RB" win over "L"/"R".
    const ShapeEntry* shape = nullptr;
    std::string_view digits;
    for (const ShapeEntry& s : kShapes) {
        std::string_view letter = s.letter;
        if (name.starts_with(letter) &&
            (!shape || letter.size() > std::string_view(shape->letter).size())) {
            shape = &s;
            digits = name.substr(letter.size());
        }
    }
    if (!shape || digits.size() != 4)
        throw std::invalid_argument("unrecognized plan name: " + std::string(name));

    std::vector<int> ids;
    for (char c : digits) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad leaf digit in plan name");
        ids.push_back(c - '0');
    }
    std::size_t next = 0;
    std::string_view sk = shape->skeleton;
    std::function<PlanNode(std::size_t&)> build = [&](std::size_t& pos) -> PlanNode {
        if (sk[pos] == '.') {
            ++pos;
            return PlanNode::scan(ids[next++], RelationStats{});
        }
        ++pos;  // '('
        PlanNode b = build(pos);
        PlanNode p = build(pos);
        ++pos;  // ')'
        return PlanNode::hash_join(std::move(b), std::move(p), HashTableSpec{},
                                   RelationStats{});
    };
    std::size_t pos = 0;
    PlanNode structure = build(pos);
    return propagate_cardinalities(structure, q);
}

}  // namespace memjoin
