#include "memjoin/plan.hpp"

#include <charconv>
#include <stdexcept>

namespace memjoin {

PlanNode PlanNode::scan(int relation_id, RelationStats stats) {
    PlanNode n;
    n.relation_id_ = relation_id;
    n.output_ = stats;
    return n;
}

PlanNode PlanNode::hash_join(PlanNode build, PlanNode probe, HashTableSpec build_table,
                             RelationStats output) {
    PlanNode n;
    n.output_ = output;
    n.build_table_ = build_table;
    n.build_ = std::make_unique<PlanNode>(std::move(build));
    n.probe_ = std::make_unique<PlanNode>(std::move(probe));
    return n;
}

PlanNode& PlanNode::operator=(const PlanNode& o) {
    if (this == &o) return *this;
    relation_id_ = o.relation_id_;
    output_ = o.output_;
    build_table_ = o.build_table_;
    build_ = o.build_ ? std::make_unique<PlanNode>(*o.build_) : nullptr;
    probe_ = o.probe_ ? std::make_unique<PlanNode>(*o.probe_) : nullptr;
    return *this;
}

int PlanNode::leaf_count() const {
    if (is_scan()) return 1;
    return build_->leaf_count() + probe_->leaf_count();
}

namespace {

void write_grammar(const PlanNode& p, std::string& out) {
    if (p.is_scan()) {
        out += "scan:";
        out += std::to_string(p.relation_id());
        return;
    }
    out += "join(";
    write_grammar(p.build(), out);
    out += ',';
    write_grammar(p.probe(), out);
    out += ')';
}

class GrammarParser {
public:
    explicit GrammarParser(std::string_view text) : text_(text) {}

    PlanNode parse() {
        PlanNode n = node();
        if (pos_ != text_.size()) fail("trailing characters");
        return n;
    }

private:
    PlanNode node() {
        if (consume("scan:")) {
            int id = 0;
            const char* begin = text_.data() + pos_;
            const char* end = text_.data() + text_.size();
            auto [ptr, ec] = std::from_chars(begin, end, id);
            if (ec != std::errc() || ptr == begin) fail("expected relation id");
            pos_ += static_cast<std::size_t>(ptr - begin);
            return PlanNode::scan(id, RelationStats{});
        }
        if (consume("join(")) {
            PlanNode build = node();
            expect(',');
            PlanNode probe = node();
            expect(')');
            return PlanNode::hash_join(std::move(build), std::move(probe), HashTableSpec{},
                                       RelationStats{});
        }
        fail("expected 'scan:' or 'join('");
    }

    bool consume(std::string_view token) {
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) fail("malformed plan text");
        ++pos_;
    }

    [[noreturn]] void fail(const char* why) {
        throw std::invalid_argument(std::string("plan grammar: ") + why + " at offset " +
                                    std::to_string(pos_));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_grammar(const PlanNode& plan) {
    std::string out;
    write_grammar(plan, out);
    return out;
}

PlanNode parse_grammar(std::string_view text) { return GrammarParser(text).parse(); }

}  // namespace memjoin
