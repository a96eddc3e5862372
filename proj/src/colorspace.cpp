#include "osteo/colorspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace osteo {

namespace {

// Linear sRGB to XYZ, D65.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// White point as the row sums above, so that gray maps to a = b = 0. The Y
// row sums to 1.0000001 rather than 1, so it is not hard-coded either.
constexpr double kWhiteX = 0.4124564 + 0.3575761 + 0.1804375;
constexpr double kWhiteY = 0.2126729 + 0.7151522 + 0.0721750;
constexpr double kWhiteZ = 0.0193339 + 0.1191920 + 0.9503041;

constexpr double kDelta = 6.0 / 29.0;

double srgb_decode(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

const std::array<double, 256>& decode_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) t[i] = srgb_decode(i / 255.0);
        return t;
    }();
    return table;
}

}  // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const auto& lin = decode_table();
    const double r = lin[r8];
    const double g = lin[g8];
    const double b = lin[b8];
    const double x = kRgbToXyz[0][0] * r + kRgbToXyz[0][1] * g + kRgbToXyz[0][2] * b;
    const double y = kRgbToXyz[1][0] * r + kRgbToXyz[1][1] * g + kRgbToXyz[1][2] * b;
    const double z = kRgbToXyz[2][0] * r + kRgbToXyz[2][1] * g + kRgbToXyz[2][2] * b;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return Lab{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage rgb_to_lab(const RawImage& img) {
    if (img.channels != 3) throw ShapeError("rgb_to_lab expects a 3-channel image");
    LabImage lab;
    lab.width = img.width;
    lab.height = img.height;
    const std::size_t n = img.pixel_count();
    lab.L.resize(n);
    lab.a.resize(n);
    lab.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Lab v = srgb_to_lab(img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]);
        lab.L[i] = v.L;
        lab.a[i] = v.a;
        lab.b[i] = v.b;
    }
    return lab;
}

LabPlanes lab_channels(const LabImage& lab) {
    LabPlanes planes{FloatImage(lab.width, lab.height, 1), FloatImage(lab.width, lab.height, 1),
                     FloatImage(lab.width, lab.height, 1)};
    for (std::size_t i = 0; i < lab.pixel_count(); ++i) {
        planes.L.pixels[i] = std::clamp(lightness_to_unit(lab.L[i]), 0.0, 1.0);
        planes.a.pixels[i] = std::clamp(chroma_to_unit(lab.a[i]), 0.0, 1.0);
        planes.b.pixels[i] = std::clamp(chroma_to_unit(lab.b[i]), 0.0, 1.0);
    }
    return planes;
}

}  // namespace osteo
