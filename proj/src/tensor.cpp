#include "osteo/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace osteo::nn {

namespace {

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(what) + " must have rank " + std::to_string(rank) + ", got " +
                         shape_string(t.shape()));
    }
}

}  // namespace

std::size_t shape_product(std::span<const std::size_t> shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    for (std::size_t d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive");
    }
    data_.assign(shape_product(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    for (std::size_t d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive");
    }
    if (data_.size() != shape_product(shape_)) {
        throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                         shape_string(shape_));
    }
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    return Tensor(std::move(shape), data_);
}

Tensor conv2d_forward(const Tensor& x, const Tensor& kernels, const Tensor& bias) {
    require_rank(x, 3, "conv2d input");
    require_rank(kernels, 4, "conv2d kernels");
    require_rank(bias, 1, "conv2d bias");
    const std::size_t channels = x.dim(0), h = x.dim(1), w = x.dim(2);
    const std::size_t out_channels = kernels.dim(0);
    if (kernels.dim(1) != channels || kernels.dim(2) != kKernelSize || kernels.dim(3) != kKernelSize) {
        throw ShapeError("conv2d kernels " + shape_string(kernels.shape()) + " do not fit input " +
                         shape_string(x.shape()));
    }
    if (bias.dim(0) != out_channels) throw ShapeError("conv2d bias length must equal the kernel count");
    if (h < kKernelSize || w < kKernelSize) throw ShapeError("conv2d input is smaller than the 3x3 kernel");

    const std::size_t oh = h - 2, ow = w - 2;
    Tensor out({out_channels, oh, ow});
    for (std::size_t k = 0; k < out_channels; ++k) {
        double* dst = &out.at(k, 0, 0);
        std::fill_n(dst, oh * ow, bias[k]);
        for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t di = 0; di < kKernelSize; ++di) {
                for (std::size_t dj = 0; dj < kKernelSize; ++dj) {
                    const double wv = kernels[((k * channels + c) * kKernelSize + di) * kKernelSize + dj];
                    for (std::size_t i = 0; i < oh; ++i) {
                        const double* src = &x.at(c, i + di, dj);
                        double* row = dst + i * ow;
                        for (std::size_t j = 0; j < ow; ++j) row[j] += wv * src[j];
                    }
                }
            }
        }
    }
    return out;
}

ConvGrads conv2d_backward(const Tensor& x, const Tensor& kernels, const Tensor& upstream) {
    const std::size_t channels = x.dim(0);
    const std::size_t out_channels = kernels.dim(0);
    const std::size_t oh = upstream.dim(1), ow = upstream.dim(2);
    if (upstream.dim(0) != out_channels || oh + 2 != x.dim(1) || ow + 2 != x.dim(2)) {
        throw ShapeError("conv2d upstream gradient does not match the forward shapes");
    }
    ConvGrads g{Tensor(x.shape()), Tensor(kernels.shape()), Tensor({out_channels})};
    for (std::size_t k = 0; k < out_channels; ++k) {
        const double* up = &upstream.at(k, 0, 0);
        double bsum = 0.0;
        for (std::size_t i = 0; i < oh * ow; ++i) bsum += up[i];
        g.bias[k] = bsum;
        for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t di = 0; di < kKernelSize; ++di) {
                for (std::size_t dj = 0; dj < kKernelSize; ++dj) {
                    const std::size_t widx = ((k * channels + c) * kKernelSize + di) * kKernelSize + dj;
                    const double wv = kernels[widx];
                    double acc = 0.0;
                    for (std::size_t i = 0; i < oh; ++i) {
                        const double* src = &x.at(c, i + di, dj);
                        double* dx = &g.input.at(c, i + di, dj);
                        const double* row = up + i * ow;
                        for (std::size_t j = 0; j < ow; ++j) {
                            acc += row[j] * src[j];
                            dx[j] += wv * row[j];
                        }
                    }
                    g.kernels[widx] = acc;
                }
            }
        }
    }
    return g;
}

PoolResult maxpool2d_forward(const Tensor& x) {
    require_rank(x, 3, "maxpool2d input");
    const std::size_t channels = x.dim(0), h = x.dim(1), w = x.dim(2);
    if (h < 2 || w < 2) throw ShapeError("maxpool2d input must be at least 2x2");
    const std::size_t oh = h / 2, ow = w / 2;
    PoolResult r{Tensor({channels, oh, ow}), std::vector<std::uint32_t>(channels * oh * ow)};
    std::size_t o = 0;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j, ++o) {
                std::size_t best = (c * h + 2 * i) * w + 2 * j;
                for (std::size_t di = 0; di < 2; ++di) {
                    for (std::size_t dj = 0; dj < 2; ++dj) {
                        const std::size_t idx = (c * h + 2 * i + di) * w + 2 * j + dj;
                        if (x[idx] > x[best]) best = idx;
                    }
                }
                r.output[o] = x[best];
                r.argmax[o] = static_cast<std::uint32_t>(best);
            }
        }
    }
    return r;
}

Tensor maxpool2d_backward(const std::vector<std::size_t>& input_shape, const std::vector<std::uint32_t>& argmax,
                          const Tensor& upstream) {
    if (argmax.size() != upstream.size()) throw ShapeError("maxpool2d routing does not match the upstream gradient");
    Tensor dx(input_shape);
    for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += upstream[o];
    return dx;
}

Tensor dense_forward(const Tensor& x, const Tensor& weights, const Tensor& bias) {
    require_rank(x, 1, "dense input");
    require_rank(weights, 2, "dense weights");
    require_rank(bias, 1, "dense bias");
    const std::size_t m = weights.dim(0), n = weights.dim(1);
    if (x.dim(0) != n) {
        throw ShapeError("dense input " + shape_string(x.shape()) + " does not fit weights " +
                         shape_string(weights.shape()));
    }
    if (bias.dim(0) != m) throw ShapeError("dense bias length must equal the output width");
    Tensor out({m});
    for (std::size_t r = 0; r < m; ++r) {
        const double* row = weights.data().data() + r * n;
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += row[c] * x[c];
        out[r] = acc + bias[r];
    }
    return out;
}

DenseGrads dense_backward(const Tensor& x, const Tensor& weights, const Tensor& upstream) {
    const std::size_t m = weights.dim(0), n = weights.dim(1);
    if (upstream.size() != m || x.size() != n) throw ShapeError("dense upstream gradient does not match the forward shapes");
    DenseGrads g{Tensor({n}), Tensor({m, n}), Tensor({m})};
    for (std::size_t r = 0; r < m; ++r) {
        const double d = upstream[r];
        g.bias[r] = d;
        const double* row = weights.data().data() + r * n;
        double* grow = g.weights.data().data() + r * n;
        for (std::size_t c = 0; c < n; ++c) {
            grow[c] = d * x[c];
            g.input[c] += row[c] * d;
        }
    }
    return g;
}

Tensor relu(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& upstream) {
    Tensor g = upstream;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(x[i] > 0.0)) g[i] = 0.0;
    }
    return g;
}

Tensor sigmoid(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data()) v = 1.0 / (1.0 + std::exp(-v));
    return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& upstream) {
    Tensor g = upstream;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
    return g;
}

Tensor softmax(const Tensor& logits) {
    require_rank(logits, 1, "softmax input");
    const double peak = *std::max_element(logits.data().begin(), logits.data().end());
    Tensor out = logits;
    double sum = 0.0;
    for (double& v : out.data()) {
        v = std::exp(v - peak);
        sum += v;
    }
    for (double& v : out.data()) v /= sum;
    return out;
}

double softmax_cross_entropy(const Tensor& logits, std::size_t target) {
    require_rank(logits, 1, "softmax input");
    if (target >= logits.size()) throw ShapeError("cross-entropy target out of range");
    const double peak = *std::max_element(logits.data().begin(), logits.data().end());
    double sum = 0.0;
    for (double v : logits.data()) sum += std::exp(v - peak);
    return std::log(sum) - (logits[target] - peak);
}

}  // namespace osteo::nn
