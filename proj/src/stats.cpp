#include "memjoin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace memjoin {

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return xs[a] < xs[b];
    });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
    const auto n = static_cast<double>(xs.size());
    long double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const long double mx = sx / n, my = sy / n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const long double dx = xs[i] - mx;
        const long double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    return pearson(rx, ry);
}

AccuracyReport accuracy_report(std::span<const double> predictions,
                               std::span<const double> observations,
                               std::span<const std::string> names,
                               const std::string& baseline_name, double band_pct,
                               bool fit_scale) {
    if (predictions.empty()) throw std::invalid_argument("accuracy_report: empty input");
    if (predictions.size() != observations.size() || predictions.size() != names.size())
        throw std::invalid_argument("accuracy_report: length mismatch");

    AccuracyReport report;
    double scale = 1.0;
    if (fit_scale) {
        long double num = 0, den = 0;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            num += predictions[i] * observations[i];
            den += predictions[i] * predictions[i];
        }
        if (den > 0 && num > 0) scale = static_cast<double>(num / den);
    }
    report.scale = scale;

    std::size_t base = 0;
    if (!baseline_name.empty()) {
        const auto it = std::find(names.begin(), names.end(), baseline_name);
        if (it == names.end())
            throw std::invalid_argument("accuracy_report: unknown baseline " + baseline_name);
        base = static_cast<std::size_t>(it - names.begin());
    } else {
        for (std::size_t i = 1; i < observations.size(); ++i)
            if (observations[i] < observations[base]) base = i;
    }
    report.baseline = names[base];

    std::size_t in_band = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        AccuracyRow row;
        row.name = names[i];
        row.predicted = predictions[i] * scale;
        row.observed = observations[i];
        row.error_pct =
            observations[i] != 0 ? 100.0 * (row.predicted - row.observed) / row.observed : 0.0;
        row.within_band = std::abs(row.error_pct) <= band_pct;
        in_band += row.within_band ? 1 : 0;
        row.predicted_slowdown =
            predictions[base] != 0 ? predictions[i] / predictions[base] : 0.0;
        row.observed_slowdown =
            observations[base] != 0 ? observations[i] / observations[base] : 0.0;
        report.rows.push_back(std::move(row));
    }
    report.band_fraction =
        static_cast<double>(in_band) / static_cast<double>(predictions.size());
    if (predictions.size() >= 2) {
        std::vector<double> p(predictions.begin(), predictions.end());
        std::vector<double> o(observations.begin(), observations.end());
        report.pearson = pearson(p, o);
        report.spearman = spearman(p, o);
    }
    return report;
}

}  // namespace memjoin
