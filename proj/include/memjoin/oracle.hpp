#pragma once

#include <string>
#include <vector>

#include "memjoin/hash_table.hpp"
#include "memjoin/plan_space.hpp"
#include "memjoin/relation.hpp"
#include "memjoin/types.hpp"

namespace memjoin {

/// Cache-line event counts observed by replaying a plan over real data,
/// the software stand-in for hardware performance counters.
struct OracleCounts {
    struct OperatorCounts {
        std::string op;  // "scan R<k>" / "probe p<i>s<j>" / "build p<i>"
        AccessCounts counts;
    };
    std::vector<OperatorCounts> per_operator;
    AccessCounts total;
};

/// Replay `plan` over `db` single-threaded at cache-line granularity: scans
/// cost one sr per tuple-stream line, every insert one rw for the header
/// line plus mode-dependent sw events for slots past the first line, every
/// probe one rr for the bucket's first line plus sr for the extra lines its
/// actual occupancy spans. Overflow-chain nodes cost one sw to append and
/// one rr per probe-time visit; the model never accounts for them, which is
/// exactly the divergence skewed builds are expected to show. With uniform
/// bucket occupancy the totals equal plan_counts by construction.
OracleCounts simulate_counts(const NamedPlan& plan, const Database& db,
                             std::uint64_t cache_line, SwMode mode,
                             HashMode hash = HashMode::Multiplicative);

}  // namespace memjoin
