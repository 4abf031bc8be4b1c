#pragma once

#include <cstdint>

namespace memjoin {

/// splitmix64: seed expander and stand-alone generator. Also doubles as the
/// default multiplicative key mixer for the hash table.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xorshift128+ generator. Small state, fast, good enough for offset
/// shuffling and data generation.
class Xorshift128 {
public:
    explicit Xorshift128(std::uint64_t seed) {
        s0_ = mix64(seed);
        s1_ = mix64(seed + 0x632be59bd9b4e019ULL);
        if (s0_ == 0 && s1_ == 0) s1_ = 1;
    }

    std::uint64_t next() {
        std::uint64_t x = s0_;
        const std::uint64_t y = s1_;
        s0_ = y;
        x ^= x << 23;
        s1_ = x ^ y ^ (x >> 17) ^ (y >> 26);
        return s1_ + y;
    }

    /// Uniform in [0, bound). Rejection-free modulo is fine here: bound is
    /// far below 2^64 in every use, so the bias is negligible for shuffles.
    std::uint64_t next_below(std::uint64_t bound) { return bound ? next() % bound : 0; }

    double next_double() {  // [0, 1)
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
    }

private:
    std::uint64_t s0_, s1_;
};

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle_in_place(T* data, std::uint64_t n, Xorshift128& rng) {
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = rng.next_below(i);
        T tmp = data[i - 1];
        data[i - 1] = data[j];
        data[j] = tmp;
    }
}

}  // namespace memjoin
