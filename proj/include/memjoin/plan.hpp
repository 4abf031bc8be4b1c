#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "memjoin/types.hpp"

namespace memjoin {

/// Binary join tree. Leaves scan a base relation; internal nodes are hash
/// joins whose build child is stored in `build_table` and whose probe child
/// streams against it. Output cardinalities are annotations supplied by the
/// plan-space module, never computed here.
class PlanNode {
public:
    static PlanNode scan(int relation_id, RelationStats stats);
    static PlanNode hash_join(PlanNode build, PlanNode probe, HashTableSpec build_table,
                              RelationStats output);

    PlanNode(const PlanNode& o) { *this = o; }
    PlanNode& operator=(const PlanNode& o);
    PlanNode(PlanNode&&) noexcept = default;
    PlanNode& operator=(PlanNode&&) noexcept = default;

    bool is_scan() const { return !build_; }
    int relation_id() const { return relation_id_; }
    const RelationStats& output() const { return output_; }
    const HashTableSpec& build_table() const { return build_table_; }
    const PlanNode& build() const { return *build_; }
    const PlanNode& probe() const { return *probe_; }

    RelationStats& mutable_output() { return output_; }
    HashTableSpec& mutable_build_table() { return build_table_; }
    PlanNode& mutable_build() { return *build_; }
    PlanNode& mutable_probe() { return *probe_; }

    int leaf_count() const;

private:
    PlanNode() = default;

    int relation_id_ = -1;
    RelationStats output_;
    HashTableSpec build_table_;
    std::unique_ptr<PlanNode> build_;
    std::unique_ptr<PlanNode> probe_;
};

/// Single-line plan grammar: `scan:<id>` | `join(<build>,<probe>)`.
std::string to_grammar(const PlanNode& plan);

/// Parse the grammar above. Stats and table specs come back empty; run the
/// plan through plan-space annotation before costing it.
PlanNode parse_grammar(std::string_view text);

}  // namespace memjoin
