#pragma once

// Independent reference implementations used only by tests. Each one follows
// the textbook definition directly and shares no code with the library paths
// it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// Row-major gray image as plain vectors.
struct Gray {
    int w = 0;
    int h = 0;
    std::vector<double> px;
    double at(int x, int y) const { return px[static_cast<std::size_t>(y) * w + x]; }
};

inline Gray random_gray(int w, int h, std::uint32_t seed) {
    std::mt19937 gen(seed);
    Gray g{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    for (auto& v : g.px) v = static_cast<double>(gen()) / 4294967295.0;
    return g;
}

// Brute force over the clipped square window, plain weighted mean.
inline Gray bilateral(const Gray& in, double sigma_s, double sigma_r, int radius) {
    Gray out{in.w, in.h, std::vector<double>(in.px.size())};
    for (int y = 0; y < in.h; ++y) {
        for (int x = 0; x < in.w; ++x) {
            double num = 0.0, den = 0.0;
            for (int qy = y - radius; qy <= y + radius; ++qy) {
                for (int qx = x - radius; qx <= x + radius; ++qx) {
                    if (qx < 0 || qy < 0 || qx >= in.w || qy >= in.h) continue;
                    const double ds = (qx - x) * (qx - x) + (qy - y) * (qy - y);
                    const double dr = in.at(qx, qy) - in.at(x, y);
                    const double w = std::exp(-ds / (2 * sigma_s * sigma_s)) * std::exp(-dr * dr / (2 * sigma_r * sigma_r));
                    num += w * in.at(qx, qy);
                    den += w;
                }
            }
            out.px[static_cast<std::size_t>(y) * in.w + x] = num / den;
        }
    }
    return out;
}

// Direct 2-D normalized Gaussian over the clipped window.
inline Gray gaussian(const Gray& in, double sigma_s, int radius) {
    Gray out{in.w, in.h, std::vector<double>(in.px.size())};
    for (int y = 0; y < in.h; ++y) {
        for (int x = 0; x < in.w; ++x) {
            double num = 0.0, den = 0.0;
            for (int qy = std::max(0, y - radius); qy <= std::min(in.h - 1, y + radius); ++qy) {
                for (int qx = std::max(0, x - radius); qx <= std::min(in.w - 1, x + radius); ++qx) {
                    const double w = std::exp(-((qx - x) * (qx - x) + (qy - y) * (qy - y)) / (2 * sigma_s * sigma_s));
                    num += w * in.at(qx, qy);
                    den += w;
                }
            }
            out.px[static_cast<std::size_t>(y) * in.w + x] = num / den;
        }
    }
    return out;
}

// Otsu by exhaustive scan: for every candidate bin k, split the pixels
// themselves into bin <= k and bin > k and compute w0 w1 (mu0 - mu1)^2.
// Returns the winning k (lowest among near-equal maxima), or -1 if no split.
inline int otsu_bin(const std::vector<double>& px) {
    auto bin = [](double v) { return static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5)); };
    std::array<double, 255> score{};
    double best = -1.0;
    for (int k = 0; k < 255; ++k) {
        double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (double v : px) {
            if (bin(v) <= k) {
                n0 += 1;
                s0 += bin(v);
            } else {
                n1 += 1;
                s1 += bin(v);
            }
        }
        score[k] = -1.0;
        if (n0 == 0 || n1 == 0) continue;
        const double n = n0 + n1;
        const double d = s0 / n0 - s1 / n1;
        score[k] = (n0 / n) * (n1 / n) * d * d;
        best = std::max(best, score[k]);
    }
    if (best < 0) return -1;
    for (int k = 0; k < 255; ++k) {
        if (score[k] >= best * (1 - 1e-12)) return k;
    }
    return -1;
}

// Sliding-window cross-correlation, quadruple loop.
inline std::vector<double> conv_valid(const std::vector<double>& x, int c, int h, int w, const std::vector<double>& k,
                                      int kcount, const std::vector<double>& bias) {
    const int oh = h - 2, ow = w - 2;
    std::vector<double> out(static_cast<std::size_t>(kcount) * oh * ow);
    for (int o = 0; o < kcount; ++o)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) {
                double s = bias[o];
                for (int ch = 0; ch < c; ++ch)
                    for (int di = 0; di < 3; ++di)
                        for (int dj = 0; dj < 3; ++dj)
                            s += x[(ch * h + i + di) * w + j + dj] * k[((o * c + ch) * 3 + di) * 3 + dj];
                out[(o * oh + i) * ow + j] = s;
            }
    return out;
}

inline std::vector<double> window_max(const std::vector<double>& x, int c, int h, int w) {
    std::vector<double> out;
    for (int ch = 0; ch < c; ++ch)
        for (int i = 0; i + 1 < h; i += 2)
            for (int j = 0; j + 1 < w; j += 2)
                out.push_back(std::max({x[(ch * h + i) * w + j], x[(ch * h + i) * w + j + 1],
                                        x[(ch * h + i + 1) * w + j], x[(ch * h + i + 1) * w + j + 1]}));
    return out;
}

// Minimum 2-cluster inertia over every labeling with both groups non-empty.
struct Partition {
    double inertia = std::numeric_limits<double>::infinity();
    double mean0 = 0.0;
    double mean1 = 0.0;
};

inline Partition best_two_partition(const std::vector<double>& pts) {
    Partition best;
    const std::size_t n = pts.size();
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        double s[2] = {0, 0}, c[2] = {0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1u;
            s[g] += pts[i];
            c[g] += 1;
        }
        const double m[2] = {s[0] / c[0], s[1] / c[1]};
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = pts[i] - m[(mask >> i) & 1u];
            inertia += d * d;
        }
        if (inertia < best.inertia) best = {inertia, std::min(m[0], m[1]), std::max(m[0], m[1])};
    }
    return best;
}

// sRGB (8-bit) to CIELAB with the published D65 tristimulus values.
struct LabRef {
    double L, a, b;
};

inline LabRef srgb_to_lab(int r8, int g8, int b8) {
    auto lin = [](int v) {
        const double c = v / 255.0;
        return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    };
    const double r = lin(r8), g = lin(g8), b = lin(b8);
    const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    auto f = [](double t) {
        const double d = 6.0 / 29.0;
        return t > d * d * d ? std::pow(t, 1.0 / 3.0) : t / (3 * d * d) + 4.0 / 29.0;
    };
    const double fx = f(X / 0.95047), fy = f(Y / 1.0), fz = f(Z / 1.08883);
    return {116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)};
}

}  // namespace oracle
