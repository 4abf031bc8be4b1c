#pragma once

#include <cstdint>
#include <span>

#include "memjoin/plan.hpp"

namespace memjoin {

/// Unit counts of the linear disk-I/O baseline: sequential page units and
/// random page touches per plan. Both depend only on the cardinalities and
/// widths flowing through each operator, never on which side builds, so
/// structurally different plans over the same intermediate cardinalities
/// collapse onto the same units.
struct DiskCostUnits {
    std::uint64_t seq_pages = 0;
    std::uint64_t random_touches = 0;

    bool operator==(const DiskCostUnits&) const = default;
};

/// seq pages: every base relation scanned plus every intermediate stream
/// materialized toward the next operator (the root output is consumed by the
/// aggregate and excluded, as in the memory model). Random touches: one per
/// probe lookup, with the larger input streaming against the smaller, the
/// way a disk optimizer would pick the outer.
DiskCostUnits disk_cost_units(const PlanNode& plan, std::uint64_t page_bytes);

struct FittedDiskModel {
    double c_s = 0;
    double c_r = 0;
    double residual = 0;  // sum of squared errors at the fitted weights

    double predict(const DiskCostUnits& u) const {
        return c_s * static_cast<double>(u.seq_pages) +
               c_r * static_cast<double>(u.random_touches);
    }
};

/// Non-negative least squares for the two-weight disk model, by projected
/// coordinate descent iterated to 1e-10 relative objective change.
/// Throws std::invalid_argument on length mismatch, fewer than two samples,
/// or an all-zero unit column.
FittedDiskModel fit_nonnegative(std::span<const DiskCostUnits> units,
                                std::span<const double> observed_seconds);

}  // namespace memjoin
