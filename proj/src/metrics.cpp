#include "osteo/metrics.hpp"

#include <cmath>

#include "osteo/csv.hpp"
#include "osteo/error.hpp"

namespace osteo {

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths) {
    if (predictions.size() != truths.size()) {
        throw DataError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(truths.size()) + " truths");
    }
    if (predictions.empty()) throw DataError("confusion: no predictions");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool predicted_positive = predictions[i] == Label::Osteoporotic;
        const bool actual_positive = truths[i] == Label::Osteoporotic;
        if (predicted_positive) {
            ++(actual_positive ? c.tp : c.fp);
        } else {
            ++(actual_positive ? c.fn : c.tn);
        }
    }
    return c;
}

std::optional<double> sensitivity(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> specificity(const ConfusionCounts& c) {
    if (c.tn + c.fp == 0) return std::nullopt;
    return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

double accuracy(const ConfusionCounts& c) {
    if (c.total() == 0) throw DataError("accuracy of an empty confusion matrix is undefined");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

MetricsReport MetricsReport::from_counts(const ConfusionCounts& c) {
    MetricsReport r;
    r.sensitivity = osteo::sensitivity(c);
    r.specificity = osteo::specificity(c);
    if (c.total() > 0) r.accuracy = osteo::accuracy(c);
    return r;
}

std::string format_percent(const std::optional<double>& fraction) {
    if (!fraction) return "NA";
    return format_fixed(*fraction * 100.0, 2);
}

std::string_view category_name(TScoreCategory c) {
    switch (c) {
        case TScoreCategory::Normal: return "Normal";
        case TScoreCategory::Osteopenia: return "Osteopenia";
        case TScoreCategory::Osteoporosis: return "Osteoporosis";
    }
    return "unknown";
}

TScoreClassification classify_tscore(double t) {
    if (!std::isfinite(t)) throw DataError("T-score must be finite");
    TScoreCategory category = TScoreCategory::Normal;
    if (t <= -2.5) {
        category = TScoreCategory::Osteoporosis;
    } else if (t < -1.0) {
        category = TScoreCategory::Osteopenia;
    }
    return {t, category};
}

ComparisonTable compare_report(const MetricsReport& cnn, const MetricsReport& fnn) {
    auto row = [](std::string name, const std::optional<double>& a, const std::optional<double>& b) {
        ComparisonRow r{std::move(name), a, b, "NA"};
        if (a && b) r.winner = *a == *b ? "tie" : (*a > *b ? "CNN" : "FNN");
        return r;
    };
    ComparisonTable t;
    t.rows.push_back(row("Sensitivity", cnn.sensitivity, fnn.sensitivity));
    t.rows.push_back(row("Specificity", cnn.specificity, fnn.specificity));
    t.rows.push_back(row("Accuracy", cnn.accuracy, fnn.accuracy));
    return t;
}

std::string ComparisonTable::to_csv() const {
    std::string out = "metric,cnn,fnn,winner\n";
    for (const auto& r : rows) {
        out += r.metric + "," + format_percent(r.cnn) + "," + format_percent(r.fnn) + "," + r.winner + "\n";
    }
    return out;
}

std::string ComparisonTable::to_text() const {
    auto pad = [](std::string s, std::size_t width) {
        if (s.size() < width) s.append(width - s.size(), ' ');
        return s;
    };
    std::string out = pad("Metric", 14) + pad("CNN (%)", 10) + pad("FNN (%)", 10) + "Winner\n";
    for (const auto& r : rows) {
        out += pad(r.metric, 14) + pad(format_percent(r.cnn), 10) + pad(format_percent(r.fnn), 10) + r.winner + "\n";
    }
    return out;
}

}  // namespace osteo
