#include "osteo/imageio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

namespace osteo {

namespace {

// Decoded images larger than this are rejected as a dimension overflow.
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 31;

void check_shape(int w, int h, int c) {
    if (w <= 0 || h <= 0) throw ShapeError("image dimensions must be positive");
    if (c != 1 && c != 3) throw ShapeError("image must have 1 or 3 channels");
}

bool is_space(std::uint8_t b) {
    return b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' || b == '\f';
}

class PnmCursor {
public:
    explicit PnmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments.
    void skip_filler() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    bool at_end() const { return pos_ >= bytes_.size(); }

    // Reads an unsigned decimal token. Returns false when no digits are present.
    // Values that do not fit in 64 bits saturate.
    bool read_uint(std::uint64_t& out) {
        std::size_t start = pos_;
        std::uint64_t v = 0;
        bool saturated = false;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            const std::uint64_t digit = bytes_[pos_] - '0';
            if (v > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) saturated = true;
            if (!saturated) v = v * 10 + digit;
            ++pos_;
        }
        if (pos_ == start) return false;
        if (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') return false;
        out = saturated ? std::numeric_limits<std::uint64_t>::max() : v;
        return true;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::uint8_t peek() const { return bytes_[pos_]; }
    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint64_t header_field(PnmCursor& cur, const char* name) {
    cur.skip_filler();
    if (cur.at_end()) {
        throw PnmError(PnmError::Kind::MalformedHeader, std::string("PNM header ends before ") + name);
    }
    std::uint64_t v = 0;
    if (!cur.read_uint(v)) {
        throw PnmError(PnmError::Kind::MalformedHeader, std::string("PNM header has a non-numeric ") + name);
    }
    return v;
}

void append_uint(std::vector<std::uint8_t>& out, unsigned v) {
    const std::string s = std::to_string(v);
    out.insert(out.end(), s.begin(), s.end());
}

}  // namespace

RawImage::RawImage(int w, int h, int c) : width(w), height(h), channels(c) {
    check_shape(w, h, c);
    pixels.assign(static_cast<std::size_t>(w) * h * c, 0);
}

RawImage::RawImage(int w, int h, int c, std::vector<std::uint8_t> px)
    : width(w), height(h), channels(c), pixels(std::move(px)) {
    check_shape(w, h, c);
    if (pixels.size() != static_cast<std::size_t>(w) * h * c) {
        throw ShapeError("pixel buffer length does not match width*height*channels");
    }
}

FloatImage::FloatImage(int w, int h, int c, double fill) : width(w), height(h), channels(c) {
    check_shape(w, h, c);
    pixels.assign(static_cast<std::size_t>(w) * h * c, fill);
}

FloatImage::FloatImage(int w, int h, int c, std::vector<double> px)
    : width(w), height(h), channels(c), pixels(std::move(px)) {
    check_shape(w, h, c);
    if (pixels.size() != static_cast<std::size_t>(w) * h * c) {
        throw ShapeError("pixel buffer length does not match width*height*channels");
    }
}

RawImage read_pnm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw PnmError(PnmError::Kind::MalformedHeader, "missing PNM magic number");
    }
    int channels = 0;
    bool binary = false;
    switch (bytes[1]) {
        case '2': channels = 1; binary = false; break;
        case '3': channels = 3; binary = false; break;
        case '5': channels = 1; binary = true; break;
        case '6': channels = 3; binary = true; break;
        default:
            throw PnmError(PnmError::Kind::MalformedHeader, "unsupported PNM magic number");
    }
    PnmCursor cur(bytes);
    cur.advance(2);
    if (cur.at_end() || !(is_space(cur.peek()) || cur.peek() == '#')) {
        throw PnmError(PnmError::Kind::MalformedHeader, "PNM magic number not followed by whitespace");
    }

    const std::uint64_t width = header_field(cur, "width");
    const std::uint64_t height = header_field(cur, "height");
    const std::uint64_t maxval = header_field(cur, "maxval");
    if (width == 0 || height == 0) {
        throw PnmError(PnmError::Kind::MalformedHeader, "PNM dimensions must be positive");
    }
    const auto int_max = static_cast<std::uint64_t>(std::numeric_limits<int>::max());
    if (width > int_max || height > int_max || width > kMaxSamples / height ||
        width * height > kMaxSamples / static_cast<std::uint64_t>(channels)) {
        throw PnmError(PnmError::Kind::DimensionOverflow, "PNM dimensions too large");
    }
    if (maxval != 255) {
        throw PnmError(PnmError::Kind::UnsupportedMaxval,
                       "PNM maxval " + std::to_string(maxval) + " is not supported (need 255)");
    }

    const std::size_t count = static_cast<std::size_t>(width * height) * channels;
    std::vector<std::uint8_t> pixels;
    pixels.reserve(count);

    if (binary) {
        if (cur.at_end() || !is_space(cur.peek())) {
            throw PnmError(PnmError::Kind::Truncated, "PNM payload missing");
        }
        cur.advance(1);
        if (cur.remaining() < count) {
            throw PnmError(PnmError::Kind::Truncated,
                           "PNM payload truncated: expected " + std::to_string(count) + " bytes, got " +
                               std::to_string(cur.remaining()));
        }
        const auto rest = cur.rest().first(count);
        pixels.assign(rest.begin(), rest.end());
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            cur.skip_filler();
            if (cur.at_end()) {
                throw PnmError(PnmError::Kind::Truncated,
                               "PNM payload truncated after " + std::to_string(i) + " samples");
            }
            std::uint64_t v = 0;
            if (!cur.read_uint(v)) throw PnmError(PnmError::Kind::BadSample, "non-numeric PNM sample");
            if (v > 255) throw PnmError(PnmError::Kind::BadSample, "PNM sample exceeds maxval");
            pixels.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return RawImage(static_cast<int>(width), static_cast<int>(height), channels, std::move(pixels));
}

std::vector<std::uint8_t> write_pnm(const RawImage& img, bool binary) {
    check_shape(img.width, img.height, img.channels);
    std::vector<std::uint8_t> out;
    const char kind = img.channels == 1 ? (binary ? '5' : '2') : (binary ? '6' : '3');
    out.push_back('P');
    out.push_back(static_cast<std::uint8_t>(kind));
    out.push_back('\n');
    append_uint(out, static_cast<unsigned>(img.width));
    out.push_back(' ');
    append_uint(out, static_cast<unsigned>(img.height));
    out.push_back('\n');
    append_uint(out, 255);
    out.push_back('\n');
    if (binary) {
        out.insert(out.end(), img.pixels.begin(), img.pixels.end());
        return out;
    }
    // One image row per text line.
    const std::size_t row = static_cast<std::size_t>(img.width) * img.channels;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        append_uint(out, img.pixels[i]);
        out.push_back((i + 1) % row == 0 ? '\n' : ' ');
    }
    return out;
}

RawImage read_pnm_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return read_pnm(bytes);
    } catch (const PnmError& e) {
        throw PnmError(e.kind(), path.string() + ": " + e.what());
    }
}

void write_pnm_file(const std::filesystem::path& path, const RawImage& img, bool binary) {
    const auto bytes = write_pnm(img, binary);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

RawImage to_gray(const RawImage& img) {
    if (img.channels == 1) return img;
    if (img.channels != 3) throw ShapeError("to_gray expects 1 or 3 channels");
    RawImage out(img.width, img.height, 1);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const unsigned r = img.pixels[3 * i];
        const unsigned g = img.pixels[3 * i + 1];
        const unsigned b = img.pixels[3 * i + 2];
        // Integer form of round-half-up(0.299R + 0.587G + 0.114B).
        out.pixels[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return out;
}

FloatImage normalize(const RawImage& img) {
    FloatImage out(img.width, img.height, img.channels);
    std::transform(img.pixels.begin(), img.pixels.end(), out.pixels.begin(),
                   [](std::uint8_t v) { return v / 255.0; });
    return out;
}

RawImage denormalize(const FloatImage& img) {
    RawImage out(img.width, img.height, img.channels);
    std::transform(img.pixels.begin(), img.pixels.end(), out.pixels.begin(), [](double v) {
        const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
        return static_cast<std::uint8_t>(scaled);
    });
    return out;
}

ChannelPlanes split_channels(const RawImage& img) {
    if (img.channels != 3) throw ShapeError("split_channels expects a 3-channel image");
    ChannelPlanes planes{RawImage(img.width, img.height, 1), RawImage(img.width, img.height, 1),
                         RawImage(img.width, img.height, 1)};
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        planes.red.pixels[i] = img.pixels[3 * i];
        planes.green.pixels[i] = img.pixels[3 * i + 1];
        planes.blue.pixels[i] = img.pixels[3 * i + 2];
    }
    return planes;
}

RawImage interleave_channels(const ChannelPlanes& planes) {
    const RawImage& r = planes.red;
    for (const RawImage* p : {&planes.green, &planes.blue}) {
        if (p->width != r.width || p->height != r.height || p->channels != 1 || r.channels != 1) {
            throw ShapeError("channel planes must be single-channel with equal dimensions");
        }
    }
    RawImage out(r.width, r.height, 3);
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        out.pixels[3 * i] = planes.red.pixels[i];
        out.pixels[3 * i + 1] = planes.green.pixels[i];
        out.pixels[3 * i + 2] = planes.blue.pixels[i];
    }
    return out;
}

FloatImage resize_bilinear(const FloatImage& img, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1) throw ShapeError("resize target dimensions must be at least 1");
    FloatImage out(new_width, new_height, img.channels);

    auto source_coord = [](int i, int out_extent, int in_extent) {
        if (out_extent == 1) return 0.5 * (in_extent - 1);
        return static_cast<double>(i) * (in_extent - 1) / (out_extent - 1);
    };

    for (int y = 0; y < new_height; ++y) {
        const double sy = source_coord(y, new_height, img.height);
        const int y0 = std::min(static_cast<int>(sy), img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < new_width; ++x) {
            const double sx = source_coord(x, new_width, img.width);
            const int x0 = std::min(static_cast<int>(sx), img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            for (int c = 0; c < img.channels; ++c) {
                const double top = img.at(x0, y0, c) + fx * (img.at(x1, y0, c) - img.at(x0, y0, c));
                const double bottom = img.at(x0, y1, c) + fx * (img.at(x1, y1, c) - img.at(x0, y1, c));
                out.at(x, y, c) = top + fy * (bottom - top);
            }
        }
    }
    return out;
}

}  // namespace osteo
