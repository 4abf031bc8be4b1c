#pragma once

#include <cstdint>
#include <vector>

#include "memjoin/plan_space.hpp"

namespace memjoin {

/// Columnar relation with two 8-byte attributes: `key` (attribute a, a
/// random permutation of 1..cardinality) and `ref` (attribute b, references
/// into the next relation's key space, drawn per JoinSpec).
struct Relation {
    std::vector<std::uint64_t> key;
    std::vector<std::uint64_t> ref;

    std::uint64_t size() const { return key.size(); }
    std::uint64_t bytes() const { return (key.size() + ref.size()) * 8; }
};

/// Generate one relation deterministically from `seed`.
///
/// attribute a: seeded Fisher-Yates permutation of 1..cardinality.
/// attribute b: with zipf_factor == 0, values cover [1, D] as evenly as
/// possible (then shuffled) with D = round(key_range / (p * f)); the even
/// spread makes match counts exact rather than expected. With
/// zipf_factor > 0, b values are keys drawn with probability proportional to
/// 1/rank^s. match_probability == 0 puts every reference out of range.
Relation generate_relation(std::uint64_t cardinality, std::uint64_t key_range,
                           const JoinSpec& spec, std::uint64_t seed);

using Database = std::vector<Relation>;

/// Generate the whole chain: relation k references relation k+1's key space;
/// the last relation's b column is filled from its own key range (it only
/// feeds the aggregate).
Database generate_database(const ChainQuery& q, std::uint64_t seed);

}  // namespace memjoin
