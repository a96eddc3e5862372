#include "osteo/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace osteo {

namespace {

void require_gray(const FloatImage& img, const char* op) {
    if (img.channels != 1) throw ShapeError(std::string(op) + " expects a single-channel image");
}

void require_finite(const FloatImage& img) {
    for (double v : img.pixels) {
        if (!std::isfinite(v)) throw DataError("image contains non-finite pixel values");
    }
}

}  // namespace

void BilateralParams::validate() const {
    if (!std::isfinite(sigma_spatial) || sigma_spatial <= 0.0) {
        throw DataError("sigma_spatial must be finite and positive");
    }
    if (!std::isfinite(sigma_range) || sigma_range <= 0.0) {
        throw DataError("sigma_range must be finite and positive");
    }
    if (radius < 1) throw DataError("bilateral radius must be at least 1");
}

FloatImage bilateral_filter(const FloatImage& img, const BilateralParams& params) {
    require_gray(img, "bilateral_filter");
    params.validate();
    require_finite(img);

    const int r = params.radius;
    const int side = 2 * r + 1;
    const double spatial_scale = -1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
    const double range_scale = -1.0 / (2.0 * params.sigma_range * params.sigma_range);

    std::vector<double> spatial(static_cast<std::size_t>(side) * side);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            spatial[(dy + r) * side + (dx + r)] = std::exp(static_cast<double>(dx * dx + dy * dy) * spatial_scale);
        }
    }

    FloatImage out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y) {
        const int y_lo = std::max(0, y - r);
        const int y_hi = std::min(img.height - 1, y + r);
        for (int x = 0; x < img.width; ++x) {
            const int x_lo = std::max(0, x - r);
            const int x_hi = std::min(img.width - 1, x + r);
            const double center = img.at(x, y);
            double num = 0.0;
            double den = 0.0;
            double lo = center;
            double hi = center;
            for (int qy = y_lo; qy <= y_hi; ++qy) {
                const double* row = &spatial[(qy - y + r) * side + r - x];
                for (int qx = x_lo; qx <= x_hi; ++qx) {
                    const double v = img.at(qx, qy);
                    const double d = v - center;
                    const double w = row[qx] * std::exp(d * d * range_scale);
                    num += w * d;
                    den += w;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            // Accumulating offsets from the center keeps flat regions exact;
            // the clamp absorbs rounding at the edges of the convex hull.
            // den >= 1 because the center pixel has unit weight.
            out.at(x, y) = std::clamp(center + num / den, lo, hi);
        }
    }
    return out;
}

FloatImage gaussian_blur(const FloatImage& img, double sigma_spatial, int radius) {
    require_gray(img, "gaussian_blur");
    BilateralParams{sigma_spatial, 1.0, radius}.validate();
    require_finite(img);

    std::vector<double> kernel(2 * radius + 1);
    for (int d = -radius; d <= radius; ++d) {
        kernel[d + radius] = std::exp(-static_cast<double>(d * d) / (2.0 * sigma_spatial * sigma_spatial));
    }

    // A clipped square window factors into clipped 1-D windows, so the
    // renormalized 2-D blur equals two renormalized 1-D passes.
    FloatImage horizontal(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double center = img.at(x, y);
            double num = 0.0;
            double den = 0.0;
            for (int qx = std::max(0, x - radius); qx <= std::min(img.width - 1, x + radius); ++qx) {
                const double w = kernel[qx - x + radius];
                num += w * (img.at(qx, y) - center);
                den += w;
            }
            horizontal.at(x, y) = center + num / den;
        }
    }
    FloatImage out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double center = horizontal.at(x, y);
            double num = 0.0;
            double den = 0.0;
            for (int qy = std::max(0, y - radius); qy <= std::min(img.height - 1, y + radius); ++qy) {
                const double w = kernel[qy - y + radius];
                num += w * (horizontal.at(x, qy) - center);
                den += w;
            }
            out.at(x, y) = center + num / den;
        }
    }
    return out;
}

SerializedImage serialize(const FloatImage& img) {
    require_gray(img, "serialize");
    return SerializedImage{img.width, img.height, img.pixels};
}

FloatImage deserialize(const SerializedImage& s) {
    if (s.width <= 0 || s.height <= 0) throw ShapeError("serialized image has non-positive dimensions");
    if (s.values.size() != static_cast<std::size_t>(s.width) * s.height) {
        throw ShapeError("serialized length " + std::to_string(s.values.size()) + " does not match " +
                         std::to_string(s.width) + "x" + std::to_string(s.height));
    }
    return FloatImage(s.width, s.height, 1, s.values);
}

}  // namespace osteo
