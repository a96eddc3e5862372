#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "osteo/error.hpp"

namespace osteo {

/// 8-bit image, row-major, channel-interleaved for RGB.
struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    RawImage() = default;
    RawImage(int w, int h, int c);
    RawImage(int w, int h, int c, std::vector<std::uint8_t> px);

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const RawImage&, const RawImage&) = default;
};

/// Normalized image with values in [0, 1].
struct FloatImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> pixels;

    FloatImage() = default;
    FloatImage(int w, int h, int c = 1, double fill = 0.0);
    FloatImage(int w, int h, int c, std::vector<double> px);

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    double& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const FloatImage&, const FloatImage&) = default;
};

/// Raised by read_pnm; kind() tells which check failed.
class PnmError : public DataError {
public:
    enum class Kind { MalformedHeader, UnsupportedMaxval, Truncated, DimensionOverflow, BadSample };

    PnmError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Decodes P2/P3/P5/P6 with maxval 255.
RawImage read_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pnm(const RawImage& img, bool binary = true);

RawImage read_pnm_file(const std::filesystem::path& path);
void write_pnm_file(const std::filesystem::path& path, const RawImage& img, bool binary = true);

/// BT.601 luma with round-half-up; gray input is returned unchanged.
RawImage to_gray(const RawImage& img);

FloatImage normalize(const RawImage& img);
/// Inverse of normalize: round(v * 255), clamped to [0, 255].
RawImage denormalize(const FloatImage& img);

struct ChannelPlanes {
    RawImage red;
    RawImage green;
    RawImage blue;
};

ChannelPlanes split_channels(const RawImage& img);
RawImage interleave_channels(const ChannelPlanes& planes);

/// Bilinear resize with corner-aligned sampling: output corners land exactly
/// on input corners. A target extent of 1 samples the input center.
FloatImage resize_bilinear(const FloatImage& img, int new_width, int new_height);

}  // namespace osteo
