#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osteo/label.hpp"
#include "osteo/network.hpp"

namespace osteo::nn {

struct LabeledExample {
    Tensor input;
    Label label = Label::Normal;
};

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t batch_size = 8;
    int epochs = 20;
    std::uint64_t seed = 0;
    /// Stop after the first epoch whose mean loss falls below this; 0 disables.
    double stop_loss = 0.0;

    void validate() const;
};

struct CurveRow {
    int epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    Network network;
    std::vector<CurveRow> curve;
};

/// Mini-batch SGD with momentum on cross-entropy.
///
/// Each epoch visits the examples in an order shuffled from the seed; each
/// batch applies the mean gradient as v = momentum * v - lr * g, w += v.
/// Curve rows carry the mean loss and accuracy of the forward passes made
/// during that epoch. Throws DataError for an empty or single-class dataset
/// and NumericError on a non-finite loss.
TrainResult train(Network network, std::span<const LabeledExample> data, const TrainConfig& config);

struct Prediction {
    Label label = Label::Normal;
    double confidence = 0.0;
};

/// Argmax of a two-class probability vector; an exact tie goes to Normal.
Prediction decide(const Tensor& probabilities);
Prediction predict(const Network& network, const Tensor& input);

}  // namespace osteo::nn
