#include "osteo/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "osteo/random.hpp"

namespace osteo {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Nearest centroid by squared distance; ties go to the lowest index.
// Returns the total inertia.
double assign(const FeatureMatrix& points, const std::vector<double>& centroids, std::size_t k,
              std::vector<std::uint32_t>& assignments, std::vector<double>& distances) {
    const std::size_t dim = points.dim();
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.count(); ++i) {
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            const double d = squared_distance(points.row(i), {centroids.data() + c * dim, dim});
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::uint32_t>(c);
            }
        }
        assignments[i] = best;
        distances[i] = best_d;
        inertia += best_d;
    }
    return inertia;
}

std::vector<double> kmeanspp_seed(const FeatureMatrix& points, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = points.count();
    const std::size_t dim = points.dim();
    std::vector<double> centroids;
    centroids.reserve(k * dim);

    auto push = [&](std::size_t i) {
        const auto r = points.row(i);
        centroids.insert(centroids.end(), r.begin(), r.end());
    };
    push(static_cast<std::size_t>(rng.below(n)));

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        const std::span<const double> last{centroids.data() + (c - 1) * dim, dim};
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points.row(i), last));
            total += nearest[i];
        }
        // total > 0 whenever k <= distinct points; fall back to the first
        // uncovered point if rounding leaves the draw past the end.
        const double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] <= 0.0) continue;
            acc += nearest[i];
            if (acc > target) {
                pick = i;
                break;
            }
        }
        if (pick == n) {
            for (std::size_t i = n; i-- > 0;) {
                if (nearest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        push(pick);
    }
    return centroids;
}

Segmentation relabel(KMeansModel model, int width, int height) {
    const std::size_t k = model.k;
    const std::size_t dim = model.dim;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.centroids[a * dim] < model.centroids[b * dim];
    });
    std::vector<std::uint32_t> rank(k);
    std::vector<double> sorted(k * dim);
    for (std::size_t r = 0; r < k; ++r) {
        rank[order[r]] = static_cast<std::uint32_t>(r);
        std::copy_n(model.centroids.begin() + order[r] * dim, dim, sorted.begin() + r * dim);
    }
    model.centroids = std::move(sorted);
    for (auto& a : model.assignments) a = rank[a];

    Segmentation seg;
    seg.width = width;
    seg.height = height;
    seg.labels = model.assignments;
    seg.model = std::move(model);
    return seg;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0) throw ShapeError("feature dimension must be positive");
    if (data_.size() % dim_ != 0) throw ShapeError("feature data length is not a multiple of the dimension");
}

std::size_t count_distinct(const FeatureMatrix& points) {
    std::vector<std::size_t> idx(points.count());
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
        const auto ra = points.row(a);
        const auto rb = points.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(idx.begin(), idx.end(), less);
    std::size_t distinct = idx.empty() ? 0 : 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (less(idx[i - 1], idx[i])) ++distinct;
    }
    return distinct;
}

KMeansModel kmeans_fit(const FeatureMatrix& points, const KMeansParams& params) {
    if (points.count() == 0) throw DataError("kmeans_fit needs at least one point");
    if (params.k == 0) throw DataError("kmeans_fit: k must be at least 1");
    const std::size_t distinct = count_distinct(points);
    if (params.k > distinct) {
        throw DataError("kmeans_fit: k = " + std::to_string(params.k) + " exceeds the " +
                        std::to_string(distinct) + " distinct points");
    }
    return kmeans_fit_from(points, kmeanspp_seed(points, params.k, params.seed), params.max_iter, params.tol);
}

KMeansModel kmeans_fit_from(const FeatureMatrix& points, std::vector<double> initial_centroids, int max_iter,
                            double tol) {
    const std::size_t n = points.count();
    const std::size_t dim = points.dim();
    if (n == 0) throw DataError("kmeans_fit needs at least one point");
    if (initial_centroids.empty() || initial_centroids.size() % dim != 0) {
        throw ShapeError("initial centroids must be a non-empty k x dim array");
    }
    if (max_iter < 0) throw DataError("max_iter must be non-negative");

    KMeansModel model;
    model.dim = dim;
    model.k = initial_centroids.size() / dim;
    model.centroids = std::move(initial_centroids);
    model.assignments.assign(n, 0);
    std::vector<double> distances(n);
    model.inertia = assign(points, model.centroids, model.k, model.assignments, distances);
    model.inertia_history.push_back(model.inertia);

    std::vector<double> sums(model.k * dim);
    std::vector<std::size_t> counts(model.k);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = model.assignments[i];
            ++counts[c];
            const auto r = points.row(i);
            for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += r[d];
        }

        double max_shift = 0.0;
        for (std::size_t c = 0; c < model.k; ++c) {
            std::vector<double> updated(dim);
            if (counts[c] > 0) {
                for (std::size_t d = 0; d < dim; ++d) {
                    updated[d] = sums[c * dim + d] / static_cast<double>(counts[c]);
                }
            } else {
                // Empty cluster: restart it at the point farthest from its centroid.
                const auto far = static_cast<std::size_t>(
                    std::max_element(distances.begin(), distances.end()) - distances.begin());
                const auto r = points.row(far);
                std::copy(r.begin(), r.end(), updated.begin());
                distances[far] = 0.0;
            }
            const std::span<const double> old{model.centroids.data() + c * dim, dim};
            max_shift = std::max(max_shift, std::sqrt(squared_distance(old, updated)));
            std::copy(updated.begin(), updated.end(), model.centroids.begin() + c * dim);
        }

        model.inertia = assign(points, model.centroids, model.k, model.assignments, distances);
        model.inertia_history.push_back(model.inertia);
        model.iterations_run = iter + 1;
        if (max_shift < tol) break;
    }
    return model;
}

double kmeans_inertia(const FeatureMatrix& points, const KMeansModel& model) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.count(); ++i) {
        inertia += squared_distance(points.row(i), model.centroid(model.assignments.at(i)));
    }
    return inertia;
}

FeatureMatrix intensity_features(const FloatImage& img) {
    if (img.channels != 1) throw ShapeError("intensity features need a single-channel image");
    return FeatureMatrix(1, img.pixels);
}

FeatureMatrix lab_features(const LabImage& lab) {
    std::vector<double> data(lab.pixel_count() * 3);
    for (std::size_t i = 0; i < lab.pixel_count(); ++i) {
        data[3 * i] = lab.L[i];
        data[3 * i + 1] = lab.a[i] / 128.0;
        data[3 * i + 2] = lab.b[i] / 128.0;
    }
    return FeatureMatrix(3, std::move(data));
}

Segmentation segment_image(const FloatImage& img, const KMeansParams& params) {
    const FeatureMatrix features = intensity_features(img);
    return relabel(kmeans_fit(features, params), img.width, img.height);
}

Segmentation segment_image(const LabImage& lab, const KMeansParams& params) {
    const FeatureMatrix features = lab_features(lab);
    return relabel(kmeans_fit(features, params), lab.width, lab.height);
}

RawImage label_image(const Segmentation& seg) {
    RawImage out(seg.width, seg.height, 1);
    const std::size_t k = seg.model.k;
    for (std::size_t i = 0; i < seg.labels.size(); ++i) {
        out.pixels[i] = k <= 1 ? 0 : static_cast<std::uint8_t>(seg.labels[i] * 255 / (k - 1));
    }
    return out;
}

}  // namespace osteo
