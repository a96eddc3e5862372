#pragma once

#include <vector>

#include "osteo/imageio.hpp"

namespace osteo {

/// Bilateral filter scales. Range sigma is in normalized intensity units.
struct BilateralParams {
    double sigma_spatial = 3.0;
    double sigma_range = 0.1;
    int radius = 6;

    /// Throws DataError unless both sigmas are finite and positive and radius >= 1.
    void validate() const;
};

/// Exact bilateral filter over a (2r+1)^2 square window. The window is
/// clipped at the image border and weights are renormalized over the
/// pixels that remain, so no values are invented outside the image.
FloatImage bilateral_filter(const FloatImage& img, const BilateralParams& params);

/// Separable Gaussian blur with the same clipped window and renormalization.
/// This is the limit of bilateral_filter as sigma_range grows without bound.
FloatImage gaussian_blur(const FloatImage& img, double sigma_spatial, int radius);

struct SerializedImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    friend bool operator==(const SerializedImage&, const SerializedImage&) = default;
};

/// Row-major flattening: values[y * width + x] == img(x, y).
SerializedImage serialize(const FloatImage& img);
FloatImage deserialize(const SerializedImage& s);

}  // namespace osteo
