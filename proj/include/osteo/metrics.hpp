#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osteo/error.hpp"
#include "osteo/label.hpp"

namespace osteo {

/// Confusion tallies with Osteoporotic as the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths);

/// tp / (tp + fn); nullopt when there are no positive cases.
std::optional<double> sensitivity(const ConfusionCounts& c);
/// tn / (tn + fp); nullopt when there are no negative cases.
std::optional<double> specificity(const ConfusionCounts& c);
/// (tp + tn) / total; throws DataError when total is zero.
double accuracy(const ConfusionCounts& c);

struct MetricsReport {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> accuracy;

    static MetricsReport from_counts(const ConfusionCounts& c);
};

/// Percent with two decimals ("88.30"), or "NA" for an undefined value.
std::string format_percent(const std::optional<double>& fraction);

enum class TScoreCategory { Normal, Osteopenia, Osteoporosis };

struct TScoreClassification {
    double tscore = 0.0;
    TScoreCategory category = TScoreCategory::Normal;
};

std::string_view category_name(TScoreCategory c);

/// t <= -2.5 osteoporosis; -2.5 < t < -1.0 osteopenia; t >= -1.0 normal.
TScoreClassification classify_tscore(double t);

struct ComparisonRow {
    std::string metric;
    std::optional<double> cnn;
    std::optional<double> fnn;
    /// "CNN", "FNN", "tie", or "NA" when either side is undefined.
    std::string winner;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    /// metric,cnn,fnn,winner with percent values.
    std::string to_csv() const;
    /// Aligned text in the layout Metric | CNN (%) | FNN (%) | Winner.
    std::string to_text() const;
};

/// Higher is better for every metric; exactly equal values tie.
ComparisonTable compare_report(const MetricsReport& cnn, const MetricsReport& fnn);

}  // namespace osteo
