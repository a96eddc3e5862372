#pragma once

#include <cstdint>
#include <optional>

#include "osteo/imageio.hpp"

namespace osteo {

struct PorosityResult {
    std::uint64_t black_pixels = 0;
    std::uint64_t total_pixels = 0;
    double porosity = 0.0;
    double threshold_used = 0.0;

    /// Complement of porosity: (total - black) / total.
    double whiteness() const;
};

/// Histogram bin of a normalized pixel: round-half-up(v * 255), clamped.
int intensity_bin(double v);

/// Otsu's threshold over a 256-bin histogram.
///
/// The winning split puts bins [0, k] in the dark class; the returned value is
/// the bin boundary (k + 0.5) / 255, so `v < threshold` reproduces the split for
/// every pixel. Between-class variances within 1e-12 (relative) of the maximum
/// are treated as ties and the lowest k wins. Throws DataError when the image
/// has fewer than two distinct histogram bins.
double otsu_threshold(const FloatImage& img);

/// 0.0 where value < threshold (pore), 1.0 elsewhere.
FloatImage binarize(const FloatImage& img, double threshold);

/// Fraction of pixels strictly below the threshold. std::nullopt selects
/// otsu_threshold. A pixel equal to the threshold is not black.
PorosityResult porosity(const FloatImage& img, std::optional<double> threshold = std::nullopt);

}  // namespace osteo
