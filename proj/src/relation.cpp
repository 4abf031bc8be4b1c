#include "memjoin/relation.hpp"

#include <cmath>
#include <stdexcept>

#include "memjoin/rng.hpp"

namespace memjoin {

namespace {

/// Inverse-CDF Zipf sampler over ranks 1..n with exponent s. Exact (no
/// approximation): the cumulative table costs 8 bytes per key, which is fine
/// at the scales the skew experiments run at.
class ZipfSampler {
public:
    ZipfSampler(std::uint64_t n, double s) : cdf_(n) {
        double sum = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            sum += 1.0 / std::pow(static_cast<double>(i + 1), s);
            cdf_[i] = sum;
        }
        for (double& v : cdf_) v /= sum;
    }

    std::uint64_t sample(Xorshift128& rng) const {
        const double u = rng.next_double();
        std::uint64_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::uint64_t mid = (lo + hi) / 2;
            if (cdf_[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo + 1;  // rank, 1-based
    }

private:
    std::vector<double> cdf_;
};

}  // namespace

Relation generate_relation(std::uint64_t cardinality, std::uint64_t key_range,
                           const JoinSpec& spec, std::uint64_t seed) {
    if (!spec.valid()) throw std::invalid_argument("invalid join spec");
    Relation rel;
    rel.key.resize(cardinality);
    rel.ref.resize(cardinality);
    for (std::uint64_t i = 0; i < cardinality; ++i) rel.key[i] = i + 1;
    Xorshift128 key_rng(mix64(seed) ^ 0x6b65790000000000ULL);
    shuffle_in_place(rel.key.data(), cardinality, key_rng);

    Xorshift128 ref_rng(mix64(seed) ^ 0x7265660000000000ULL);
    if (cardinality == 0) return rel;
    if (spec.zipf_factor > 0) {
        if (key_range == 0) throw std::invalid_argument("zipf references need a key range");
        ZipfSampler zipf(key_range, spec.zipf_factor);
        for (std::uint64_t i = 0; i < cardinality; ++i) rel.ref[i] = zipf.sample(ref_rng);
        return rel;
    }

    const double density = spec.match_probability * spec.fanout;
    if (density <= 0 || key_range == 0) {
        // No tuple may match: park every reference past the key space.
        for (std::uint64_t i = 0; i < cardinality; ++i) rel.ref[i] = key_range + 1 + i;
        return rel;
    }
    const auto spread = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(key_range) / density));
    const std::uint64_t domain = std::max<std::uint64_t>(spread, 1);
    // Even coverage of [1, domain]: value i*domain/card + 1 for the i-th
    // tuple, then shuffled. Guarantees exact match and reference counts.
    for (std::uint64_t i = 0; i < cardinality; ++i)
        rel.ref[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(i) * domain) /
                                                cardinality) +
                     1;
    shuffle_in_place(rel.ref.data(), cardinality, ref_rng);
    return rel;
}

Database generate_database(const ChainQuery& q, std::uint64_t seed) {
    q.validate();
    for (const RelationStats& r : q.relations)
        if (r.tuple_width != 16)
            throw std::invalid_argument(
                "generated relations are two 8-byte columns; tuple_width must be 16");
    Database db;
    db.reserve(q.relation_count());
    for (std::size_t k = 0; k < q.relation_count(); ++k) {
        const std::uint64_t card = q.relations[k].cardinality;
        if (k + 1 < q.relation_count()) {
            db.push_back(generate_relation(card, q.relations[k + 1].cardinality, q.joins[k],
                                           seed + k));
        } else {
            // Terminal relation: b only feeds the aggregate.
            db.push_back(generate_relation(card, card, JoinSpec{}, seed + k));
        }
    }
    return db;
}

}  // namespace memjoin
