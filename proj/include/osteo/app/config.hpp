#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "osteo/error.hpp"
#include "osteo/features.hpp"
#include "osteo/train.hpp"

namespace osteo::app {

/// Bad command-line usage or configuration; maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class ModelKind { Cnn, Fnn };

std::string_view model_name(ModelKind m);
ModelKind parse_model(std::string_view s);

/// Run configuration read from a key=value file with [section] headers.
///
///   [preprocess]  sigma_spatial, sigma_range, radius, filter, input_size
///   [model]       kind (cnn|fnn), fnn_input (features|pixels)
///   [train]       learning_rate, momentum, batch_size, epochs, seed,
///                 validation_fraction
///   [data]        dataset, output, n, seed, noise_sigma
///
/// '#' starts a comment. Unknown sections or keys are rejected by name.
/// Every key has a default, so an empty file is a complete configuration.
/// Training keys left unset take per-model defaults.
struct RunConfig {
    PreprocessOptions preprocess;

    ModelKind model = ModelKind::Cnn;
    FnnInput fnn_input = FnnInput::Features;

    std::optional<double> learning_rate;
    std::optional<double> momentum;
    std::optional<std::size_t> batch_size;
    std::optional<int> epochs;
    std::uint64_t train_seed = 7;
    double validation_fraction = 0.2;

    std::string dataset = "data";
    std::string output = "out";
    std::size_t n = 200;
    std::uint64_t data_seed = 7;
    double noise_sigma = 0.05;

    /// Training settings for a model, with unset keys filled from its defaults.
    nn::TrainConfig train_config(ModelKind m) const;
};

nn::TrainConfig default_train_config(ModelKind m);

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// The documented defaults as a config file.
std::string default_config_text();

}  // namespace osteo::app
