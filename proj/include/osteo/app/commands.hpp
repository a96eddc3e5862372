#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "osteo/app/config.hpp"
#include "osteo/checkpoint.hpp"
#include "osteo/metrics.hpp"
#include "osteo/train.hpp"

namespace osteo::app {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

/// Runs the command line (args excludes the program name) and returns the
/// exit code. Diagnostics go to `err` as a single line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ManifestEntry {
    std::string filename;
    Label label = Label::Normal;
};

/// Reads <dir>/manifest.csv.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& dir);

/// Seeded shuffle of [0, n); the first round(fraction * n) indices form the
/// validation subset. Both subsets are non-empty whenever n >= 2.
std::vector<bool> validation_mask(std::size_t n, double fraction, std::uint64_t seed);

/// Everything needed to turn an image file into network input.
struct ModelSettings {
    ModelKind model = ModelKind::Cnn;
    FnnInput fnn_input = FnnInput::Features;
    PreprocessOptions preprocess;

    std::string to_notes() const;
    static ModelSettings from_notes(const std::string& notes);
};

nn::Tensor model_input(const RawImage& raw, const ModelSettings& settings);
nn::Network initial_network(const ModelSettings& settings, std::uint64_t seed);

struct Evaluation {
    ConfusionCounts counts;
    MetricsReport report;
    std::vector<nn::Prediction> predictions;
};

Evaluation evaluate(const nn::Network& network, std::span<const nn::LabeledExample> examples);

/// model,sensitivity,specificity,accuracy,tp,fp,tn,fn
std::string metrics_csv(std::string_view model, const Evaluation& eval);

/// Reads a metrics CSV; metrics are recomputed from the counts.
MetricsReport read_metrics_csv(const std::filesystem::path& path);

}  // namespace osteo::app
