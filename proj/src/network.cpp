#include "osteo/network.hpp"

#include <cmath>

#include "osteo/random.hpp"

namespace osteo::nn {

std::string_view layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::Relu: return "relu";
        case LayerKind::Sigmoid: return "sigmoid";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Dense: return "dense";
        case LayerKind::Softmax: return "softmax";
    }
    return "unknown";
}

namespace {

std::vector<std::vector<std::size_t>> parameter_shapes(const LayerSpec& spec, const std::vector<std::size_t>& in) {
    switch (spec.kind) {
        case LayerKind::Conv2d: return {{spec.units, in[0], kKernelSize, kKernelSize}, {spec.units}};
        case LayerKind::Dense: return {{spec.units, in[0]}, {spec.units}};
        default: return {};
    }
}

}  // namespace

Network Network::build(std::vector<std::size_t> input_shape, std::vector<LayerSpec> layers, std::uint64_t seed) {
    Network net;
    net.input_shape_ = std::move(input_shape);
    net.layers_ = std::move(layers);
    net.validate_architecture();

    Rng rng(seed);
    for (std::size_t i = 0; i < net.layers_.size(); ++i) {
        const auto shapes = parameter_shapes(net.layers_[i], net.shapes_[i]);
        if (shapes.empty()) continue;
        Tensor weights(shapes[0]);
        const double fan_in = static_cast<double>(weights.size() / shapes[0][0]);
        const double limit = std::sqrt(6.0 / fan_in);
        for (double& w : weights.data()) w = rng.uniform(-limit, limit);
        net.parameters_.push_back(std::move(weights));
        net.parameters_.emplace_back(shapes[1]);
    }
    return net;
}

Network::Network(std::vector<std::size_t> input_shape, std::vector<LayerSpec> layers, std::vector<Tensor> parameters)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)), parameters_(std::move(parameters)) {
    validate_architecture();
    std::size_t expected = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (const auto& shape : parameter_shapes(layers_[i], shapes_[i])) {
            if (expected >= parameters_.size() || parameters_[expected].shape() != shape) {
                throw ShapeError("parameter " + std::to_string(expected) + " does not match layer " +
                                 std::to_string(i) + " (" + std::string(layer_kind_name(layers_[i].kind)) + ")");
            }
            ++expected;
        }
    }
    if (expected != parameters_.size()) throw ShapeError("network has more parameter tensors than layers need");
}

void Network::validate_architecture() {
    if (input_shape_.empty()) throw ShapeError("network input shape is empty");
    for (std::size_t d : input_shape_) {
        if (d == 0) throw ShapeError("network input dimensions must be positive");
    }
    if (layers_.empty()) throw ShapeError("network has no layers");

    shapes_.assign(1, input_shape_);
    param_offset_.clear();
    int next_param = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const LayerSpec& spec = layers_[i];
        const auto& in = shapes_.back();
        const std::string where = "layer " + std::to_string(i) + " (" + std::string(layer_kind_name(spec.kind)) + "): ";
        std::vector<std::size_t> out;
        switch (spec.kind) {
            case LayerKind::Conv2d:
                if (spec.units == 0) throw ShapeError(where + "needs at least one output channel");
                if (in.size() != 3) throw ShapeError(where + "expects a [C,H,W] input");
                if (in[1] < kKernelSize || in[2] < kKernelSize) throw ShapeError(where + "kernel does not fit input");
                out = {spec.units, in[1] - 2, in[2] - 2};
                break;
            case LayerKind::MaxPool2d:
                if (in.size() != 3) throw ShapeError(where + "expects a [C,H,W] input");
                if (in[1] < 2 || in[2] < 2) throw ShapeError(where + "input must be at least 2x2");
                out = {in[0], in[1] / 2, in[2] / 2};
                break;
            case LayerKind::Flatten:
                out = {shape_product(in)};
                break;
            case LayerKind::Dense:
                if (spec.units == 0) throw ShapeError(where + "needs at least one output unit");
                if (in.size() != 1) throw ShapeError(where + "expects a flat input");
                out = {spec.units};
                break;
            case LayerKind::Softmax:
                if (in.size() != 1) throw ShapeError(where + "expects a flat input");
                if (i + 1 != layers_.size()) throw ShapeError(where + "softmax must be the last layer");
                out = in;
                break;
            case LayerKind::Relu:
            case LayerKind::Sigmoid:
                out = in;
                break;
            default:
                throw ShapeError(where + "unknown layer kind");
        }
        param_offset_.push_back(spec.has_parameters() ? next_param : -1);
        if (spec.has_parameters()) next_param += 2;
        shapes_.push_back(std::move(out));
    }
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : parameters_) n += p.size();
    return n;
}

void Network::check_input(const Tensor& x) const {
    if (x.shape() != input_shape_) throw ShapeError("network input has the wrong shape");
}

ForwardTrace Network::forward_trace(const Tensor& x) const {
    check_input(x);
    ForwardTrace trace;
    trace.activations.reserve(layers_.size() + 1);
    trace.pool_argmax.resize(layers_.size());
    trace.activations.push_back(x);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Tensor& in = trace.activations.back();
        const int p = param_offset_[i];
        Tensor out;
        switch (layers_[i].kind) {
            case LayerKind::Conv2d: out = conv2d_forward(in, parameters_[p], parameters_[p + 1]); break;
            case LayerKind::MaxPool2d: {
                PoolResult r = maxpool2d_forward(in);
                out = std::move(r.output);
                trace.pool_argmax[i] = std::move(r.argmax);
                break;
            }
            case LayerKind::Relu: out = relu(in); break;
            case LayerKind::Sigmoid: out = sigmoid(in); break;
            case LayerKind::Flatten: out = in.reshaped({in.size()}); break;
            case LayerKind::Dense: out = dense_forward(in, parameters_[p], parameters_[p + 1]); break;
            case LayerKind::Softmax: out = softmax(in); break;
        }
        trace.activations.push_back(std::move(out));
    }
    return trace;
}

Tensor Network::forward(const Tensor& x) const {
    return forward_trace(x).output();
}

Gradients Network::backward(const ForwardTrace& trace, Label target) const {
    if (trace.empty()) throw Error("backward called without a forward trace");
    if (trace.activations.size() != layers_.size() + 1) throw Error("forward trace does not belong to this network");
    if (layers_.back().kind != LayerKind::Softmax) throw Error("backward needs a network that ends in softmax");

    const auto target_index = static_cast<std::size_t>(target);
    const Tensor& logits = trace.activations[layers_.size() - 1];
    if (target_index >= logits.size()) throw ShapeError("target class is outside the network output");

    Gradients g;
    g.parameters.resize(parameters_.size());
    g.loss = softmax_cross_entropy(logits, target_index);

    // Softmax with cross-entropy: d loss / d logits = p - onehot(target).
    Tensor upstream = trace.output();
    upstream[target_index] -= 1.0;

    for (std::size_t i = layers_.size() - 1; i-- > 0;) {
        const Tensor& in = trace.activations[i];
        const Tensor& out = trace.activations[i + 1];
        const int p = param_offset_[i];
        switch (layers_[i].kind) {
            case LayerKind::Conv2d: {
                ConvGrads cg = conv2d_backward(in, parameters_[p], upstream);
                g.parameters[p] = std::move(cg.kernels);
                g.parameters[p + 1] = std::move(cg.bias);
                upstream = std::move(cg.input);
                break;
            }
            case LayerKind::MaxPool2d:
                upstream = maxpool2d_backward(in.shape(), trace.pool_argmax[i], upstream);
                break;
            case LayerKind::Relu: upstream = relu_backward(in, upstream); break;
            case LayerKind::Sigmoid: upstream = sigmoid_backward(out, upstream); break;
            case LayerKind::Flatten: upstream = upstream.reshaped(in.shape()); break;
            case LayerKind::Dense: {
                DenseGrads dg = dense_backward(in, parameters_[p], upstream);
                g.parameters[p] = std::move(dg.weights);
                g.parameters[p + 1] = std::move(dg.bias);
                upstream = std::move(dg.input);
                break;
            }
            case LayerKind::Softmax: throw Error("softmax may only appear as the last layer");
        }
    }
    g.input = std::move(upstream);
    return g;
}

Network build_cnn(std::uint64_t seed, std::size_t size) {
    return Network::build({1, size, size},
                          {LayerSpec::conv2d(8), LayerSpec::relu(), LayerSpec::maxpool2d(), LayerSpec::conv2d(16),
                           LayerSpec::relu(), LayerSpec::maxpool2d(), LayerSpec::flatten(), LayerSpec::dense(32),
                           LayerSpec::relu(), LayerSpec::dense(2), LayerSpec::softmax()},
                          seed);
}

Network build_fnn(std::size_t feature_dim, std::uint64_t seed) {
    return Network::build({feature_dim},
                          {LayerSpec::dense(64), LayerSpec::relu(), LayerSpec::dense(16), LayerSpec::relu(),
                           LayerSpec::dense(2), LayerSpec::softmax()},
                          seed);
}

}  // namespace osteo::nn
