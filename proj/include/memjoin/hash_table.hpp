#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>

#include "memjoin/rng.hpp"
#include "memjoin/types.hpp"

namespace memjoin {

enum class HashMode {
    Multiplicative,  // 64-bit mixer, the default
    IdentityMod,     // (key - 1) mod buckets; realizes uniform occupancy on dense keys
};

/// Non-partitioned shared hash table: one contiguous bucket array, a
/// per-bucket latch in the header, fixed tuple slots, and an arena-backed
/// overflow chain for buckets that fill up. Writers latch the bucket;
/// readers run latch-free after the build barrier.
class HashTable {
public:
    HashTable(const HashTableSpec& spec, HashMode mode);

    HashTable(const HashTable&) = delete;
    HashTable& operator=(const HashTable&) = delete;

    std::uint64_t bucket_index(std::uint64_t key) const {
        return mode_ == HashMode::IdentityMod ? (key - 1) % spec_.bucket_count
                                              : mix64(key) % spec_.bucket_count;
    }

    void insert(std::uint64_t key, std::uint64_t payload);

    /// Visit the payload of every tuple whose key equals `key`.
    template <typename F>
    void for_each_match(std::uint64_t key, F&& fn) const {
        const std::uint64_t b = bucket_index(key);
        const std::byte* bucket = buffer_.get() + b * stride_;
        const std::uint32_t count = load_u32(bucket + 4);
        const std::uint32_t in_slots = count < slots_ ? count : slots_;
        const std::byte* slot = bucket + spec_.header_bytes;
        for (std::uint32_t i = 0; i < in_slots; ++i, slot += 16) {
            if (load_u64(slot) == key) fn(load_u64(slot + 8));
        }
        std::uint64_t link = load_u64(bucket + 8);
        while (link != 0) {
            const ChainNode& node = arena_[link - 1];
            if (node.key == key) fn(node.payload);
            link = node.next;
        }
    }

    const void* bucket_address(std::uint64_t key) const {
        return buffer_.get() + bucket_index(key) * stride_;
    }

    const HashTableSpec& spec() const { return spec_; }
    /// Total tuples in the bucket, slots plus chain.
    std::uint32_t occupancy(std::uint64_t bucket) const {
        return load_u32(buffer_.get() + bucket * stride_ + 4);
    }
    std::uint64_t chain_length(std::uint64_t bucket) const {
        const std::uint32_t occ = occupancy(bucket);
        return occ > slots_ ? occ - slots_ : 0;
    }
    std::uint64_t overflow_nodes() const { return arena_.size(); }
    std::uint64_t allocated_bytes() const {
        return spec_.bucket_count * stride_ + arena_.size() * sizeof(ChainNode);
    }

private:
    struct ChainNode {
        std::uint64_t key;
        std::uint64_t payload;
        std::uint64_t next;  // arena index + 1, 0 terminates
    };

    static std::uint32_t load_u32(const std::byte* p) {
        std::uint32_t v;
        std::memcpy(&v, p, 4);
        return v;
    }
    static std::uint64_t load_u64(const std::byte* p) {
        std::uint64_t v;
        std::memcpy(&v, p, 8);
        return v;
    }

    HashTableSpec spec_;
    HashMode mode_;
    std::uint64_t stride_;  // header + slots * 16, bytes per bucket
    std::uint32_t slots_;
    std::unique_ptr<std::byte[]> buffer_;
    std::deque<ChainNode> arena_;
    std::mutex arena_mutex_;
};

}  // namespace memjoin
