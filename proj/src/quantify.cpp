#include "osteo/quantify.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace osteo {

namespace {

void require_gray(const FloatImage& img, const char* op) {
    if (img.channels != 1) throw ShapeError(std::string(op) + " expects a single-channel image");
    if (img.pixels.empty()) throw DataError(std::string(op) + " needs a non-empty image");
}

}  // namespace

double PorosityResult::whiteness() const {
    return static_cast<double>(total_pixels - black_pixels) / static_cast<double>(total_pixels);
}

int intensity_bin(double v) {
    return static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
}

double otsu_threshold(const FloatImage& img) {
    require_gray(img, "otsu_threshold");
    std::array<std::uint64_t, 256> hist{};
    for (double v : img.pixels) ++hist[intensity_bin(v)];

    const auto total = static_cast<double>(img.pixels.size());
    double total_sum = 0.0;
    for (int b = 0; b < 256; ++b) total_sum += b * static_cast<double>(hist[b]);

    // Between-class variance (up to a constant factor) for a split after bin k.
    std::array<double, 256> score{};
    std::uint64_t dark_count = 0;
    double dark_sum = 0.0;
    bool any_split = false;
    for (int k = 0; k < 255; ++k) {
        dark_count += hist[k];
        dark_sum += k * static_cast<double>(hist[k]);
        score[k] = -1.0;
        if (dark_count == 0 || dark_count == img.pixels.size()) continue;
        const double w0 = static_cast<double>(dark_count) / total;
        const double w1 = 1.0 - w0;
        const double mu0 = dark_sum / static_cast<double>(dark_count);
        const double mu1 = (total_sum - dark_sum) / (total - static_cast<double>(dark_count));
        score[k] = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        any_split = true;
    }
    if (!any_split) throw DataError("otsu_threshold: image is constant, no threshold exists");

    const double best = *std::max_element(score.begin(), score.begin() + 255);
    int chosen = 0;
    while (score[chosen] < best * (1.0 - 1e-12)) ++chosen;
    return (chosen + 0.5) / 255.0;
}

FloatImage binarize(const FloatImage& img, double threshold) {
    FloatImage out(img.width, img.height, img.channels);
    std::transform(img.pixels.begin(), img.pixels.end(), out.pixels.begin(),
                   [threshold](double v) { return v < threshold ? 0.0 : 1.0; });
    return out;
}

PorosityResult porosity(const FloatImage& img, std::optional<double> threshold) {
    require_gray(img, "porosity");
    PorosityResult result;
    result.threshold_used = threshold ? *threshold : otsu_threshold(img);
    result.total_pixels = img.pixels.size();
    result.black_pixels = static_cast<std::uint64_t>(
        std::count_if(img.pixels.begin(), img.pixels.end(),
                      [t = result.threshold_used](double v) { return v < t; }));
    result.porosity = static_cast<double>(result.black_pixels) / static_cast<double>(result.total_pixels);
    return result;
}

}  // namespace osteo
