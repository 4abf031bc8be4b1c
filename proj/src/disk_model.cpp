#include "memjoin/disk_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memjoin/types.hpp"

namespace memjoin {

namespace {

void accumulate_units(const PlanNode& p, std::uint64_t page_bytes, bool is_root,
                      DiskCostUnits& u) {
    if (p.is_scan()) {
        u.seq_pages += ceil_div(p.output().cardinality * p.output().tuple_width, page_bytes);
        return;
    }
    accumulate_units(p.build(), page_bytes, false, u);
    accumulate_units(p.probe(), page_bytes, false, u);
    if (!is_root)
        u.seq_pages += ceil_div(p.output().cardinality * p.output().tuple_width, page_bytes);
    u.random_touches +=
        std::max(p.build().output().cardinality, p.probe().output().cardinality);
}

}  // namespace

DiskCostUnits disk_cost_units(const PlanNode& plan, std::uint64_t page_bytes) {
    if (page_bytes == 0) throw std::invalid_argument("page_bytes must be positive");
    DiskCostUnits u;
    accumulate_units(plan, page_bytes, true, u);
    return u;
}

FittedDiskModel fit_nonnegative(std::span<const DiskCostUnits> units,
                                std::span<const double> observed_seconds) {
    if (units.size() != observed_seconds.size())
        throw std::invalid_argument("fit_nonnegative: length mismatch");
    if (units.size() < 2) throw std::invalid_argument("fit_nonnegative: need >= 2 samples");

    const std::size_t n = units.size();
    long double ss = 0, rr = 0, sr = 0, st = 0, rt = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double s = static_cast<double>(units[i].seq_pages);
        const long double r = static_cast<double>(units[i].random_touches);
        const long double t = observed_seconds[i];
        ss += s * s;
        rr += r * r;
        sr += s * r;
        st += s * t;
        rt += r * t;
    }
    if (ss == 0 || rr == 0)
        throw std::invalid_argument("fit_nonnegative: a unit column is all zero");

    auto objective = [&](long double cs, long double cr) {
        long double obj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double e = cs * static_cast<double>(units[i].seq_pages) +
                                  cr * static_cast<double>(units[i].random_touches) -
                                  observed_seconds[i];
            obj += e * e;
        }
        return obj;
    };

    long double cs = 0, cr = 0;
    long double prev = objective(cs, cr);
    for (int iter = 0; iter < 100000; ++iter) {
        cs = std::max<long double>(0, (st - cr * sr) / ss);
        cr = std::max<long double>(0, (rt - cs * sr) / rr);
        const long double obj = objective(cs, cr);
        if (std::abs(prev - obj) <= 1e-10 * std::max<long double>(1, prev)) {
            prev = obj;
            break;
        }
        prev = obj;
    }
    return FittedDiskModel{static_cast<double>(cs), static_cast<double>(cr),
                           static_cast<double>(prev)};
}

}  // namespace memjoin
