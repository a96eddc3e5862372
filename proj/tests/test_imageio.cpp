#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "osteo/imageio.hpp"

using namespace osteo;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

RawImage decode(const std::string& s) {
    const auto b = bytes_of(s);
    return read_pnm(b);
}

PnmError::Kind error_kind(const std::string& s) {
    try {
        decode(s);
    } catch (const PnmError& e) {
        return e.kind();
    }
    FAIL("expected PnmError");
    return PnmError::Kind::MalformedHeader;
}

RawImage random_image(int w, int h, int c, std::uint32_t seed) {
    std::mt19937 gen(seed);
    RawImage img(w, h, c);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() & 0xff);
    return img;
}

}  // namespace

TEST_CASE("P5 header and payload map directly") {
    std::string s = "P5 2 2 255\n";
    s += std::string{'\x00', '\xff', '\x80', '\x40'};
    const RawImage img = decode(s);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.channels == 1);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 255, 128, 64});
}

TEST_CASE("P2 single pixel") {
    const RawImage img = decode("P2 1 1 255\n7\n");
    CHECK(img.pixels == std::vector<std::uint8_t>{7});
}

TEST_CASE("P3 and P6 encodings of the same gradient decode identically") {
    // 3x3 gradient written out by hand in both encodings.
    std::string ascii = "P3\n# hand-written gradient\n3 3\n255\n";
    std::string raw = "P6 3 3 255\n";
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            const int r = 40 * x, g = 60 * y, b = 10 * (x + y);
            ascii += std::to_string(r) + " " + std::to_string(g) + " " + std::to_string(b) + "\n";
            raw += static_cast<char>(r);
            raw += static_cast<char>(g);
            raw += static_cast<char>(b);
        }
    }
    const RawImage a = decode(ascii);
    const RawImage b = decode(raw);
    CHECK(a.channels == 3);
    CHECK(a == b);
    CHECK(a.at(2, 1, 0) == 80);
    CHECK(a.at(2, 1, 1) == 60);
    CHECK(a.at(2, 1, 2) == 30);
}

TEST_CASE("header comments are skipped") {
    const RawImage img = decode("P2\n# c1\n2 # c2\n1\n# c3\n255\n3 4\n");
    CHECK(img.pixels == std::vector<std::uint8_t>{3, 4});
}

TEST_CASE("write/read round trip is bit exact") {
    const RawImage one(1, 1, 1, {0});
    CHECK(read_pnm(write_pnm(one)) == one);
    CHECK(read_pnm(write_pnm(one, false)) == one);

    const RawImage rgb = random_image(64, 64, 3, 11);
    CHECK(read_pnm(write_pnm(rgb)) == rgb);
    CHECK(read_pnm(write_pnm(rgb, false)) == rgb);

    for (std::uint32_t seed = 0; seed < 25; ++seed) {
        std::mt19937 gen(seed);
        const int w = 1 + static_cast<int>(gen() % 17);
        const int h = 1 + static_cast<int>(gen() % 17);
        const int c = gen() % 2 ? 3 : 1;
        const RawImage img = random_image(w, h, c, seed + 100);
        CHECK(read_pnm(write_pnm(img, true)) == img);
        CHECK(read_pnm(write_pnm(img, false)) == img);
    }
}

TEST_CASE("ASCII gray output starts with P2") {
    const auto bytes = write_pnm(RawImage(2, 2, 1), false);
    CHECK(std::string(bytes.begin(), bytes.begin() + 2) == "P2");
    const auto rgb = write_pnm(RawImage(2, 2, 3), true);
    CHECK(std::string(rgb.begin(), rgb.begin() + 2) == "P6");
}

TEST_CASE("each decode failure reports its own kind") {
    using K = PnmError::Kind;
    CHECK(error_kind("P7 1 1 255\n") == K::MalformedHeader);
    CHECK(error_kind("P5 x 1 255\n") == K::MalformedHeader);
    CHECK(error_kind("P5 0 1 255\n") == K::MalformedHeader);
    CHECK(error_kind("P5 1 1") == K::MalformedHeader);
    CHECK(error_kind("P5 1 1 65535\n\x01\x02") == K::UnsupportedMaxval);
    CHECK(error_kind("P2 1 1 15\n7") == K::UnsupportedMaxval);
    CHECK(error_kind("P5 2 2 255\n\x01\x02") == K::Truncated);
    CHECK(error_kind("P2 2 1 255\n7") == K::Truncated);
    CHECK(error_kind("P5 100000 100000 255\n") == K::DimensionOverflow);
    CHECK(error_kind("P2 1 1 255\n300") == K::BadSample);
    CHECK(error_kind("P2 1 1 255\nab") == K::BadSample);
    CHECK_THROWS_AS(decode("P9"), DataError);
}

TEST_CASE("to_gray uses rounded BT.601 luma") {
    const RawImage px(3, 1, 3, {255, 255, 255, 0, 0, 0, 255, 0, 0});
    const RawImage g = to_gray(px);
    CHECK(g.channels == 1);
    CHECK(g.pixels == std::vector<std::uint8_t>{255, 0, 76});

    // Independent check: the weighted sum in thousandths is exact, so round
    // half up by comparing the remainder. Binary floating point misplaces
    // exact halves such as 58.5.
    const RawImage img = random_image(32, 32, 3, 5);
    const RawImage gray = to_gray(img);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const long milli = 299L * img.pixels[3 * i] + 587L * img.pixels[3 * i + 1] + 114L * img.pixels[3 * i + 2];
        CHECK(gray.pixels[i] == milli / 1000 + (milli % 1000 >= 500 ? 1 : 0));
    }
    CHECK(to_gray(gray) == gray);
}

TEST_CASE("normalize scales by 1/255 and inverts exactly") {
    const FloatImage f = normalize(RawImage(3, 1, 1, {0, 255, 51}));
    CHECK(f.pixels[0] == 0.0);
    CHECK(f.pixels[1] == 1.0);
    CHECK(f.pixels[2] == doctest::Approx(0.2).epsilon(1e-15));

    RawImage all(256, 1, 1);
    for (int v = 0; v < 256; ++v) all.pixels[v] = static_cast<std::uint8_t>(v);
    const FloatImage n = normalize(all);
    for (int v = 1; v < 256; ++v) CHECK(n.pixels[v] > n.pixels[v - 1]);
    CHECK(denormalize(n) == all);

    const FloatImage zero = normalize(RawImage(4, 4, 1));
    for (double v : zero.pixels) CHECK(v == 0.0);
}

TEST_CASE("denormalize clamps out-of-range values") {
    const RawImage r = denormalize(FloatImage(3, 1, 1, {-0.5, 1.5, 0.5}));
    CHECK(r.pixels == std::vector<std::uint8_t>{0, 255, 128});
}

TEST_CASE("split_channels and interleave") {
    const ChannelPlanes p = split_channels(RawImage(1, 1, 3, {10, 20, 30}));
    CHECK(p.red.pixels == std::vector<std::uint8_t>{10});
    CHECK(p.green.pixels == std::vector<std::uint8_t>{20});
    CHECK(p.blue.pixels == std::vector<std::uint8_t>{30});

    RawImage grayish(4, 3, 3);
    for (std::size_t i = 0; i < grayish.pixel_count(); ++i)
        for (int c = 0; c < 3; ++c) grayish.pixels[3 * i + c] = static_cast<std::uint8_t>(17 * i);
    const ChannelPlanes g = split_channels(grayish);
    CHECK(g.red == g.green);
    CHECK(g.green == g.blue);

    const RawImage img = random_image(9, 7, 3, 3);
    const ChannelPlanes s = split_channels(img);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        CHECK(s.red.pixels[i] == img.pixels[3 * i]);
        CHECK(s.green.pixels[i] == img.pixels[3 * i + 1]);
        CHECK(s.blue.pixels[i] == img.pixels[3 * i + 2]);
    }
    CHECK(interleave_channels(s) == img);
    CHECK_THROWS_AS(split_channels(RawImage(2, 2, 1)), ShapeError);
}

TEST_CASE("resize_bilinear") {
    const FloatImage c(5, 4, 1, 0.5);
    for (auto [w, h] : {std::pair{1, 1}, {3, 9}, {17, 2}}) {
        const FloatImage r = resize_bilinear(c, w, h);
        CHECK(r.width == w);
        CHECK(r.height == h);
        for (double v : r.pixels) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    }

    const FloatImage mid = resize_bilinear(FloatImage(2, 1, 1, {0.0, 1.0}), 3, 1);
    CHECK(mid.pixels[0] == 0.0);
    CHECK(mid.pixels[1] == doctest::Approx(0.5));
    CHECK(mid.pixels[2] == 1.0);

    // Smooth ramp survives a down/up round trip.
    FloatImage ramp(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) ramp.at(x, y) = 0.5 * x / 63.0 + 0.5 * y / 63.0;
    const FloatImage back = resize_bilinear(resize_bilinear(ramp, 16, 16), 64, 64);
    double worst = 0.0;
    for (std::size_t i = 0; i < ramp.pixels.size(); ++i)
        worst = std::max(worst, std::abs(back.pixels[i] - ramp.pixels[i]));
    CHECK(worst < 0.02);

    CHECK_THROWS_AS(resize_bilinear(c, 0, 3), ShapeError);
}

TEST_CASE("image constructors validate") {
    CHECK_THROWS_AS(RawImage(0, 1, 1), ShapeError);
    CHECK_THROWS_AS(RawImage(1, 1, 2), ShapeError);
    CHECK_THROWS_AS(RawImage(2, 2, 1, std::vector<std::uint8_t>(3)), ShapeError);
    CHECK_THROWS_AS(FloatImage(2, 1, 1, std::vector<double>{0.1}), ShapeError);
}
