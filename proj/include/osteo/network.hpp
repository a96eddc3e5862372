#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "osteo/label.hpp"
#include "osteo/tensor.hpp"

namespace osteo::nn {

enum class LayerKind : std::uint8_t {
    Conv2d = 1,
    MaxPool2d = 2,
    Relu = 3,
    Sigmoid = 4,
    Flatten = 5,
    Dense = 6,
    Softmax = 7,
};

std::string_view layer_kind_name(LayerKind kind);

/// One layer of a sequential network. `units` is the output channel count
/// for conv2d and the output width for dense; other kinds ignore it.
struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    std::uint32_t units = 0;

    static LayerSpec conv2d(std::uint32_t out_channels) { return {LayerKind::Conv2d, out_channels}; }
    static LayerSpec maxpool2d() { return {LayerKind::MaxPool2d, 0}; }
    static LayerSpec relu() { return {LayerKind::Relu, 0}; }
    static LayerSpec sigmoid() { return {LayerKind::Sigmoid, 0}; }
    static LayerSpec flatten() { return {LayerKind::Flatten, 0}; }
    static LayerSpec dense(std::uint32_t out_units) { return {LayerKind::Dense, out_units}; }
    static LayerSpec softmax() { return {LayerKind::Softmax, 0}; }

    bool has_parameters() const { return kind == LayerKind::Conv2d || kind == LayerKind::Dense; }

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Activations recorded by Network::forward_trace for a later backward pass.
struct ForwardTrace {
    /// activations[0] is the input; activations[i + 1] is the output of layer i.
    std::vector<Tensor> activations;
    /// Pool routing per layer; empty for non-pool layers.
    std::vector<std::vector<std::uint32_t>> pool_argmax;

    bool empty() const { return activations.empty(); }
    const Tensor& output() const { return activations.back(); }
};

struct Gradients {
    /// Aligned with Network::parameters().
    std::vector<Tensor> parameters;
    Tensor input;
    double loss = 0.0;
};

/// Sequential network with shape-checked layers.
///
/// Parameters live in a flat list: each conv2d or dense layer owns a weight
/// tensor followed by a bias tensor. A const Network is safe to share across
/// threads for inference.
class Network {
public:
    Network() = default;

    /// Validates the architecture against the input shape and creates
    /// parameters: He-style uniform weights in +-sqrt(6 / fan_in), zero biases.
    static Network build(std::vector<std::size_t> input_shape, std::vector<LayerSpec> layers, std::uint64_t seed);

    /// Adopts existing parameters; their shapes must match the architecture.
    Network(std::vector<std::size_t> input_shape, std::vector<LayerSpec> layers, std::vector<Tensor> parameters);

    const std::vector<std::size_t>& input_shape() const { return input_shape_; }
    const std::vector<LayerSpec>& layers() const { return layers_; }
    const std::vector<Tensor>& parameters() const { return parameters_; }
    std::vector<Tensor>& parameters() { return parameters_; }
    std::vector<std::size_t> output_shape() const { return shapes_.back(); }
    std::size_t parameter_count() const;

    Tensor forward(const Tensor& x) const;
    ForwardTrace forward_trace(const Tensor& x) const;

    /// Reverse-mode gradients of the cross-entropy loss of `target` given a
    /// trace from forward_trace. The network must end in softmax.
    Gradients backward(const ForwardTrace& trace, Label target) const;

private:
    void validate_architecture();
    void check_input(const Tensor& x) const;

    std::vector<std::size_t> input_shape_;
    std::vector<LayerSpec> layers_;
    std::vector<Tensor> parameters_;
    std::vector<std::vector<std::size_t>> shapes_;  // shapes_[i] = input shape of layer i
    std::vector<int> param_offset_;                 // -1 for parameter-free layers
};

/// conv(8) relu pool conv(16) relu pool flatten dense(32) relu dense(2) softmax
/// over a 1 x size x size input.
Network build_cnn(std::uint64_t seed, std::size_t size = 64);

/// dense(64) relu dense(16) relu dense(2) softmax over a feature vector.
Network build_fnn(std::size_t feature_dim, std::uint64_t seed);

}  // namespace osteo::nn
