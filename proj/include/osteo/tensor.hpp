#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "osteo/error.hpp"

namespace osteo::nn {

/// Dense row-major array of doubles with an explicit shape.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    const double& at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    /// Same data under a new shape with the same element count.
    Tensor reshaped(std::vector<std::size_t> shape) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::size_t shape_product(std::span<const std::size_t> shape);

// Layer primitives. Convolution is valid cross-correlation with a 3x3 kernel
// and stride 1; pooling is a 2x2 max with stride 2.

inline constexpr std::size_t kKernelSize = 3;

/// x[C,H,W], kernels[K,C,3,3], bias[K] -> [K,H-2,W-2].
Tensor conv2d_forward(const Tensor& x, const Tensor& kernels, const Tensor& bias);

struct ConvGrads {
    Tensor input;
    Tensor kernels;
    Tensor bias;
};
ConvGrads conv2d_backward(const Tensor& x, const Tensor& kernels, const Tensor& upstream);

struct PoolResult {
    Tensor output;
    /// Flat index into the input of the element chosen for each output.
    std::vector<std::uint32_t> argmax;
};

/// x[C,H,W] -> [C,H/2,W/2]. An odd trailing row or column is dropped.
/// Within a window the first maximum in row-major order wins.
PoolResult maxpool2d_forward(const Tensor& x);
Tensor maxpool2d_backward(const std::vector<std::size_t>& input_shape, const std::vector<std::uint32_t>& argmax,
                          const Tensor& upstream);

/// x[n], weights[m,n], bias[m] -> W x + b.
Tensor dense_forward(const Tensor& x, const Tensor& weights, const Tensor& bias);

struct DenseGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;
};
DenseGrads dense_backward(const Tensor& x, const Tensor& weights, const Tensor& upstream);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& upstream);
Tensor sigmoid(const Tensor& x);
Tensor sigmoid_backward(const Tensor& y, const Tensor& upstream);

/// Max-subtracted softmax over a rank-1 tensor.
Tensor softmax(const Tensor& logits);

/// -log softmax(logits)[target], computed in log-sum-exp form.
double softmax_cross_entropy(const Tensor& logits, std::size_t target);

}  // namespace osteo::nn
