#pragma once

#include <cstdint>
#include <vector>

#include "memjoin/plan_space.hpp"
#include "memjoin/relation.hpp"
#include "memjoin/types.hpp"

namespace memjoin::testing {

inline WeightVector intel_weights() { return WeightVector{1.00, 3.79, 5.03, 6.25}; }
inline WeightVector amd_weights() { return WeightVector{1.00, 6.44, 1.88, 8.42}; }

constexpr std::uint64_t kMillion = 1'000'000;

/// The 4-relation chain of the multi-join experiments: 2048/512/128/32
/// million tuples, 16-byte tuples, every reference matching exactly once.
inline ChainQuery paper_chain(double scale = 1.0) {
    ChainQuery q;
    for (const std::uint64_t m : {2048, 512, 128, 32})
        q.relations.push_back(RelationStats{
            static_cast<std::uint64_t>(static_cast<double>(m * kMillion) * scale), 16});
    q.joins.resize(3);
    return q;
}

/// Independent oracle for the bucket packing formula: lay T tuples of width
/// W as byte intervals starting at offset zero and count distinct
/// (tuple, cache line) overlapping pairs.
inline std::uint64_t overlap_pair_count(std::uint64_t tuples, std::uint64_t width,
                                        std::uint64_t cache_line) {
    std::uint64_t pairs = 0;
    for (std::uint64_t j = 0; j < tuples; ++j) {
        const std::uint64_t first = (j * width) / cache_line;
        const std::uint64_t last = (j * width + width - 1) / cache_line;
        pairs += last - first + 1;
    }
    return pairs;
}

struct ReferenceResult {
    std::uint64_t cardinality = 0;
    std::uint64_t aggregate = 0;  // SUM(R_0.a + R_n.b)
};

/// Nested-loop reference join of the whole chain, independent of the hash
/// executor. Joins left to right; quadratic, so keep inputs small.
inline ReferenceResult reference_join(const Database& db) {
    struct Row {
        std::uint64_t head_a;  // R_0.a
        std::uint64_t tail_b;  // rightmost relation's b
    };
    std::vector<Row> rows;
    rows.reserve(db[0].size());
    for (std::uint64_t i = 0; i < db[0].size(); ++i)
        rows.push_back(Row{db[0].key[i], db[0].ref[i]});
    for (std::size_t k = 1; k < db.size(); ++k) {
        const Relation& next = db[k];
        std::vector<Row> joined;
        for (const Row& row : rows) {
            for (std::uint64_t j = 0; j < next.size(); ++j) {
                if (next.key[j] == row.tail_b)
                    joined.push_back(Row{row.head_a, next.ref[j]});
            }
        }
        rows = std::move(joined);
    }
    ReferenceResult result;
    result.cardinality = rows.size();
    for (const Row& row : rows) result.aggregate += row.head_a + row.tail_b;
    return result;
}

}  // namespace memjoin::testing
