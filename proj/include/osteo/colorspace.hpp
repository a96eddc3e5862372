#pragma once

#include <vector>

#include "osteo/imageio.hpp"

namespace osteo {

/// CIELAB planes, row-major. L in [0, 100]; a and b roughly [-128, 127].
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> L;
    std::vector<double> a;
    std::vector<double> b;

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// 8-bit sRGB triple to CIELAB under a D65 white point.
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

LabImage rgb_to_lab(const RawImage& img);

struct LabPlanes {
    FloatImage L;
    FloatImage a;
    FloatImage b;
};

/// Scales L by 1/100 and maps a, b from [-128, 127] onto [0, 1] for display.
/// Values outside those ranges are clamped.
LabPlanes lab_channels(const LabImage& lab);

constexpr double lightness_to_unit(double L) { return L / 100.0; }
constexpr double unit_to_lightness(double u) { return u * 100.0; }
constexpr double chroma_to_unit(double c) { return (c + 128.0) / 255.0; }
constexpr double unit_to_chroma(double u) { return u * 255.0 - 128.0; }

}  // namespace osteo
