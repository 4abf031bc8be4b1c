#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memjoin {

/// Product-moment correlation. Empty when either input has zero variance
/// (the coefficient is undefined then, which genuinely happens: a model that
/// predicts the same cost for every plan has no variance to correlate).
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

/// Rank correlation: pearson over average-ranked data (ties share the mean
/// of the ranks they cover).
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

std::vector<double> average_ranks(std::span<const double> xs);

struct AccuracyRow {
    std::string name;
    double predicted = 0;   // after scale alignment, when enabled
    double observed = 0;
    double error_pct = 0;   // 100 * (predicted - observed) / observed
    bool within_band = false;
    double predicted_slowdown = 0;  // vs the baseline row
    double observed_slowdown = 0;
};

struct AccuracyReport {
    std::vector<AccuracyRow> rows;
    std::optional<double> pearson;
    std::optional<double> spearman;
    double band_fraction = 0;
    double scale = 1.0;        // fitted predicted-to-observed factor
    std::string baseline;
};

/// Per-plan error table plus summary metrics. When `fit_scale` is set, a
/// single positive least-squares factor aligns predictions with
/// observations before errors and the +-band are evaluated (the model is a
/// proportionality, not an equality); disable it to compare quantities that
/// already share units. The baseline row for slowdowns defaults to the row
/// with the smallest observation.
AccuracyReport accuracy_report(std::span<const double> predictions,
                               std::span<const double> observations,
                               std::span<const std::string> names,
                               const std::string& baseline_name = "",
                               double band_pct = 15.0, bool fit_scale = true);

}  // namespace memjoin
