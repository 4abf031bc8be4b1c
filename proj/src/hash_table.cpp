#include "memjoin/hash_table.hpp"

#include <stdexcept>

namespace memjoin {

namespace {

// Header layout, 16 bytes used: latch u32 @0, occupancy u32 @4, chain u64 @8.
constexpr std::uint64_t kMinHeader = 16;

}  // namespace

HashTable::HashTable(const HashTableSpec& spec, HashMode mode)
    : spec_(spec), mode_(mode) {
    if (spec.header_bytes < kMinHeader || spec.header_bytes % 8 != 0)
        throw std::invalid_argument("executor needs a header of at least 16 bytes, 8-aligned");
    if (spec.tuple_width != 16)
        throw std::invalid_argument("executor stores 16-byte tuples");
    if (spec.bucket_count == 0) throw std::invalid_argument("bucket_count must be >= 1");
    slots_ = static_cast<std::uint32_t>(spec.tuples_per_bucket);
    stride_ = spec.header_bytes + static_cast<std::uint64_t>(slots_) * 16;
    buffer_ = std::make_unique<std::byte[]>(spec.bucket_count * stride_);
    std::memset(buffer_.get(), 0, spec.bucket_count * stride_);
}

void HashTable::insert(std::uint64_t key, std::uint64_t payload) {
    const std::uint64_t b = bucket_index(key);
    std::byte* bucket = buffer_.get() + b * stride_;

    std::atomic_ref<std::uint32_t> latch(*reinterpret_cast<std::uint32_t*>(bucket));
    std::uint32_t expected = 0;
    while (!latch.compare_exchange_weak(expected, 1, std::memory_order_acquire,
                                        std::memory_order_relaxed)) {
        expected = 0;
    }

    auto* count = reinterpret_cast<std::uint32_t*>(bucket + 4);
    auto* chain = reinterpret_cast<std::uint64_t*>(bucket + 8);
    if (*count < slots_) {
        std::byte* slot = bucket + spec_.header_bytes + std::uint64_t{*count} * 16;
        std::memcpy(slot, &key, 8);
        std::memcpy(slot + 8, &payload, 8);
    } else {
        // Node is complete before it becomes reachable; the bucket latch
        // keeps *chain stable while we splice.
        std::uint64_t idx;
        {
            std::lock_guard<std::mutex> g(arena_mutex_);
            arena_.push_back(ChainNode{key, payload, *chain});
            idx = arena_.size();
        }
        *chain = idx;
    }
    ++*count;
    latch.store(0, std::memory_order_release);
}

}  // namespace memjoin
