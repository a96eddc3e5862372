#include "osteo/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osteo/quantify.hpp"
#include "osteo/segmentation.hpp"

namespace osteo {

FloatImage prepare_image(const RawImage& raw, const PreprocessOptions& options) {
    FloatImage img = normalize(to_gray(raw));
    if (img.width != options.input_size || img.height != options.input_size) {
        img = resize_bilinear(img, options.input_size, options.input_size);
    }
    if (options.filter) img = bilateral_filter(img, options.bilateral);
    return img;
}

nn::Tensor cnn_input(const FloatImage& img) {
    if (img.channels != 1) throw ShapeError("CNN input must be single-channel");
    return nn::Tensor({1, static_cast<std::size_t>(img.height), static_cast<std::size_t>(img.width)}, img.pixels);
}

std::string_view fnn_input_name(FnnInput mode) {
    return mode == FnnInput::Features ? "features" : "pixels";
}

FnnInput parse_fnn_input(std::string_view s) {
    if (s == "features") return FnnInput::Features;
    if (s == "pixels") return FnnInput::Pixels;
    throw DataError("unknown FNN input mode '" + std::string(s) + "' (expected features or pixels)");
}

std::vector<double> engineered_features(const FloatImage& img) {
    if (img.channels != 1) throw ShapeError("features need a single-channel image");
    std::vector<double> f;
    f.reserve(4 + kHistogramBins + kFeatureClusters);

    // A flat image has no Otsu split; fall back to the midpoint.
    double threshold = 0.5;
    try {
        threshold = otsu_threshold(img);
    } catch (const DataError&) {
    }
    f.push_back(porosity(img, threshold).porosity);
    f.push_back(threshold);

    std::vector<double> hist(kHistogramBins, 0.0);
    double sum = 0.0;
    for (double v : img.pixels) {
        const auto bin = std::min(kHistogramBins - 1, static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * kHistogramBins));
        hist[bin] += 1.0;
        sum += v;
    }
    const auto n = static_cast<double>(img.pixels.size());
    for (double h : hist) f.push_back(h / n);
    const double mean = sum / n;
    double var = 0.0;
    for (double v : img.pixels) var += (v - mean) * (v - mean);
    f.push_back(mean);
    f.push_back(var / n);

    const FeatureMatrix points = intensity_features(img);
    const std::size_t k = std::min(kFeatureClusters, count_distinct(points));
    std::vector<double> centroids = kmeans_fit(points, KMeansParams{k, 0, 100, 1e-6}).centroids;
    std::sort(centroids.begin(), centroids.end());
    centroids.resize(kFeatureClusters, centroids.back());
    f.insert(f.end(), centroids.begin(), centroids.end());
    return f;
}

std::size_t fnn_feature_dim(FnnInput mode) {
    return mode == FnnInput::Features ? 4 + kHistogramBins + kFeatureClusters
                                      : static_cast<std::size_t>(kPixelModeSize) * kPixelModeSize;
}

nn::Tensor fnn_input(const FloatImage& img, FnnInput mode) {
    if (mode == FnnInput::Features) {
        auto f = engineered_features(img);
        const std::size_t n = f.size();
        return nn::Tensor({n}, std::move(f));
    }
    const FloatImage small = resize_bilinear(img, kPixelModeSize, kPixelModeSize);
    return nn::Tensor({small.pixels.size()}, small.pixels);
}

}  // namespace osteo
