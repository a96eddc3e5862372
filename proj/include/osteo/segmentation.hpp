#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "osteo/colorspace.hpp"
#include "osteo/imageio.hpp"

namespace osteo {

/// Row-major point set: count() rows of dim() features.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t dim, std::vector<double> data);

    std::size_t dim() const { return dim_; }
    std::size_t count() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

struct KMeansParams {
    std::size_t k = 3;
    std::uint64_t seed = 0;
    int max_iter = 100;
    double tol = 1e-6;
};

struct KMeansModel {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;  // k x dim, row-major
    std::vector<std::uint32_t> assignments;
    double inertia = 0.0;
    int iterations_run = 0;
    /// Inertia after every assignment step, starting with the seeding.
    std::vector<double> inertia_history;

    std::span<const double> centroid(std::size_t c) const { return {centroids.data() + c * dim, dim}; }
};

std::size_t count_distinct(const FeatureMatrix& points);

/// Lloyd's algorithm from k-means++ seeding. Throws DataError when k == 0 or
/// k exceeds the number of distinct points.
KMeansModel kmeans_fit(const FeatureMatrix& points, const KMeansParams& params);

/// Lloyd's algorithm from caller-supplied centroids (k x dim, row-major).
KMeansModel kmeans_fit_from(const FeatureMatrix& points, std::vector<double> initial_centroids,
                            int max_iter, double tol);

/// Sum of squared distances from each point to its assigned centroid.
double kmeans_inertia(const FeatureMatrix& points, const KMeansModel& model);

struct Segmentation {
    KMeansModel model;
    int width = 0;
    int height = 0;
    /// One cluster index per pixel; clusters are ordered by ascending first
    /// centroid coordinate (intensity or L).
    std::vector<std::uint32_t> labels;
};

/// Intensity features for gray input.
FeatureMatrix intensity_features(const FloatImage& img);
/// (L, a/128, b/128) features for color input.
FeatureMatrix lab_features(const LabImage& lab);

Segmentation segment_image(const FloatImage& img, const KMeansParams& params);
Segmentation segment_image(const LabImage& lab, const KMeansParams& params);

/// Label image scaled to the 8-bit range: label * 255 / (k - 1), truncated.
RawImage label_image(const Segmentation& seg);

}  // namespace osteo
