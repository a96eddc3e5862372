#pragma once

#include <string_view>
#include <vector>

#include "osteo/imageio.hpp"
#include "osteo/preprocess.hpp"
#include "osteo/tensor.hpp"

namespace osteo {

/// How an image becomes network input.
struct PreprocessOptions {
    BilateralParams bilateral;
    bool filter = true;
    /// Working resolution; images are resized to input_size x input_size.
    int input_size = 64;
};

/// to_gray -> normalize -> resize -> bilateral filter (when enabled).
FloatImage prepare_image(const RawImage& raw, const PreprocessOptions& options);

/// [1, H, W] tensor of a single-channel image.
nn::Tensor cnn_input(const FloatImage& img);

enum class FnnInput { Features, Pixels };

std::string_view fnn_input_name(FnnInput mode);
FnnInput parse_fnn_input(std::string_view s);

inline constexpr std::size_t kHistogramBins = 16;
inline constexpr std::size_t kFeatureClusters = 3;
inline constexpr int kPixelModeSize = 16;

/// porosity, Otsu threshold, 16-bin histogram (fractions), mean, variance,
/// and the ascending k=3 k-means centroids: 23 values.
std::vector<double> engineered_features(const FloatImage& img);

std::size_t fnn_feature_dim(FnnInput mode);
nn::Tensor fnn_input(const FloatImage& img, FnnInput mode);

}  // namespace osteo
