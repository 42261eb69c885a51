// Procedural test content: textured color carrier images and a corpus of
// handwritten-style digit glyphs (28x28 grayscale), both deterministic
// functions of a seed. The digit corpus stands in for MNIST when no IDX
// files are available; loaders prefer real data when a dataset directory
// is supplied.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hybridbsc/image.hpp"
#include "hybridbsc/rng.hpp"

namespace hbsc {

namespace detail {

// Value noise: hash lattice corners, smoothstep-interpolate between them.
inline double lattice_value(uint64_t seed, int gx, int gy) {
    uint64_t s = seed ^ (static_cast<uint64_t>(static_cast<uint32_t>(gx)) * 0x9E3779B97F4A7C15ull) ^
                 (static_cast<uint64_t>(static_cast<uint32_t>(gy)) * 0xC2B2AE3D27D4EB4Full);
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53 * 2.0 - 1.0;  // [-1, 1)
}

inline double smoothstep01(double t) { return t * t * (3.0 - 2.0 * t); }

inline double value_noise(uint64_t seed, double x, double y, double cell) {
    const double fx = x / cell, fy = y / cell;
    const int gx = static_cast<int>(std::floor(fx)), gy = static_cast<int>(std::floor(fy));
    const double tx = smoothstep01(fx - gx), ty = smoothstep01(fy - gy);
    const double v00 = lattice_value(seed, gx, gy), v10 = lattice_value(seed, gx + 1, gy);
    const double v01 = lattice_value(seed, gx, gy + 1), v11 = lattice_value(seed, gx + 1, gy + 1);
    const double a = v00 + (v10 - v00) * tx;
    const double b = v01 + (v11 - v01) * tx;
    return a + (b - a) * ty;
}

}  // namespace detail

// Textured color image: per-channel gradients, a handful of soft elliptical
// patches, and multi-octave value noise. Texture strength is tuned so that
// baseline JPEG at mid quality lands in the PSNR regime of natural photos
// (roughly 30-33 dB at quality 75).
inline RgbImage make_carrier(int width, int height, uint64_t seed) {
    if (width <= 0 || height <= 0) throw std::runtime_error("make_carrier: bad dimensions");
    Rng rng(derive_seed(seed, 0xCA221E2));
    const double diag = std::sqrt(static_cast<double>(width) * width + static_cast<double>(height) * height);

    // Per-channel affine base in [70, 185] with mild slopes.
    std::array<double, 3> base{}, slope_x{}, slope_y{};
    for (int c = 0; c < 3; ++c) {
        base[c] = rng.uniform(90.0, 165.0);
        slope_x[c] = rng.uniform(-55.0, 55.0);
        slope_y[c] = rng.uniform(-55.0, 55.0);
    }

    // Soft elliptical patches: center, radii, edge softness, per-channel delta.
    struct Patch {
        double cx, cy, rx, ry, soft;
        std::array<double, 3> delta;
    };
    std::vector<Patch> patches;
    const int npatch = 3 + static_cast<int>(rng.bounded(4));
    for (int i = 0; i < npatch; ++i) {
        Patch p{};
        p.cx = rng.uniform(0.1, 0.9) * width;
        p.cy = rng.uniform(0.1, 0.9) * height;
        p.rx = rng.uniform(0.06, 0.28) * diag;
        p.ry = rng.uniform(0.06, 0.28) * diag;
        p.soft = rng.uniform(0.15, 0.45);
        for (int c = 0; c < 3; ++c) p.delta[c] = rng.uniform(-48.0, 48.0);
        patches.push_back(p);
    }

    // Noise octaves: two smooth chroma-scale fields plus mid-frequency texture
    // shared across channels (scaled per channel to keep them correlated).
    const uint64_t n_lum = derive_seed(seed, 1), n_c1 = derive_seed(seed, 2), n_c2 = derive_seed(seed, 3);
    const std::array<double, 6> cells{61.0, 29.0, 13.0, 6.0, 2.7, 1.0};
    const std::array<double, 6> amps{17.0, 12.0, 8.5, 4.5, 9.0, 13.0};

    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double xf = x, yf = y;
            double tex = 0.0;
            for (size_t o = 0; o < cells.size(); ++o) {
                tex += amps[o] * detail::value_noise(derive_seed(n_lum, static_cast<uint64_t>(o)), xf, yf, cells[o]);
            }
            const double c1 = 22.0 * detail::value_noise(n_c1, xf, yf, 97.0);
            const double c2 = 22.0 * detail::value_noise(n_c2, xf, yf, 83.0);
            std::array<double, 3> v{};
            for (int c = 0; c < 3; ++c) {
                v[c] = base[c] + slope_x[c] * (xf / width - 0.5) + slope_y[c] * (yf / height - 0.5) + tex;
            }
            v[0] += c1;
            v[1] += 0.5 * c2 - 0.3 * c1;
            v[2] += c2;
            for (const auto& p : patches) {
                const double dx = (xf - p.cx) / p.rx, dy = (yf - p.cy) / p.ry;
                const double d = std::sqrt(dx * dx + dy * dy);
                if (d < 1.0) {
                    const double w = detail::smoothstep01(std::min(1.0, (1.0 - d) / p.soft));
                    for (int c = 0; c < 3; ++c) v[c] += w * p.delta[c];
                }
            }
            const size_t idx = (static_cast<size_t>(y) * width + x) * 3;
            for (int c = 0; c < 3; ++c) {
                img.data[idx + c] = static_cast<uint8_t>(std::lround(std::clamp(v[c], 4.0, 251.0)));
            }
        }
    }
    return img;
}

namespace detail {

using Stroke = std::vector<std::pair<double, double>>;  // (x, y) in a unit box

inline std::vector<Stroke> digit_strokes(int cls) {
    auto loop = [](double cx, double cy, double rx, double ry) {
        Stroke s;
        for (int i = 0; i <= 14; ++i) {
            const double a = 2.0 * 3.14159265358979323846 * i / 14.0;
            s.emplace_back(cx + rx * std::sin(a), cy - ry * std::cos(a));
        }
        return s;
    };
    switch (cls) {
        case 0: return {loop(0.5, 0.5, 0.26, 0.40)};
        case 1: return {{{0.34, 0.26}, {0.52, 0.10}, {0.52, 0.90}}, {{0.36, 0.90}, {0.68, 0.90}}};
        case 2:
            return {{{0.24, 0.28},
                     {0.32, 0.13},
                     {0.52, 0.08},
                     {0.72, 0.16},
                     {0.76, 0.34},
                     {0.62, 0.55},
                     {0.40, 0.72},
                     {0.24, 0.90},
                     {0.78, 0.90}}};
        case 3:
            return {{{0.26, 0.16},
                     {0.48, 0.08},
                     {0.70, 0.18},
                     {0.70, 0.34},
                     {0.50, 0.46},
                     {0.72, 0.58},
                     {0.74, 0.78},
                     {0.50, 0.92},
                     {0.26, 0.84}}};
        case 4: return {{{0.62, 0.90}, {0.62, 0.08}, {0.22, 0.60}, {0.80, 0.60}}};
        case 5:
            return {{{0.72, 0.10},
                     {0.32, 0.10},
                     {0.28, 0.44},
                     {0.54, 0.40},
                     {0.72, 0.52},
                     {0.72, 0.76},
                     {0.52, 0.92},
                     {0.26, 0.86}}};
        case 6:
            return {{{0.66, 0.10},
                     {0.44, 0.26},
                     {0.31, 0.50},
                     {0.30, 0.74},
                     {0.48, 0.92},
                     {0.68, 0.80},
                     {0.68, 0.60},
                     {0.48, 0.52},
                     {0.31, 0.62}}};
        case 7: return {{{0.22, 0.10}, {0.78, 0.10}, {0.46, 0.90}}, {{0.34, 0.50}, {0.66, 0.50}}};
        case 8: return {loop(0.5, 0.29, 0.19, 0.19), loop(0.5, 0.69, 0.23, 0.21)};
        case 9: return {loop(0.49, 0.30, 0.20, 0.20), {{0.69, 0.30}, {0.66, 0.62}, {0.58, 0.90}}};
        default: throw std::runtime_error("digit_strokes: class out of range");
    }
}

}  // namespace detail

// One 28x28 glyph of the given class with a small random affine perturbation
// and a Gaussian pen profile, emulating anti-aliased handwriting scans.
inline GrayImage make_digit(int cls, uint64_t seed) {
    if (cls < 0 || cls > 9) throw std::runtime_error("make_digit: class out of range");
    Rng rng(derive_seed(seed, 0xD161u, static_cast<uint64_t>(cls)));

    const double rot = rng.uniform(-0.16, 0.16);
    const double scale = rng.uniform(0.82, 1.04);
    const double shear = rng.uniform(-0.12, 0.12);
    const double dx = rng.uniform(-1.4, 1.4), dy = rng.uniform(-1.4, 1.4);
    const double pen = rng.uniform(0.82, 1.10);  // Gaussian pen sigma in pixels
    const double cr = std::cos(rot), sr = std::sin(rot);

    // Unit box -> 20x24 px glyph box centered in the 28x28 canvas.
    auto map_pt = [&](double u, double v) {
        double gx = (u - 0.5) * 20.0, gy = (v - 0.5) * 24.0;
        gx += shear * gy;
        const double rx = cr * gx - sr * gy, ry = sr * gx + cr * gy;
        return std::pair<double, double>{14.0 + scale * rx + dx, 14.0 + scale * ry + dy};
    };

    std::array<double, 28 * 28> acc{};
    auto stamp = [&](double px, double py) {
        const int x0 = std::max(0, static_cast<int>(std::floor(px - 3.0 * pen)));
        const int x1 = std::min(27, static_cast<int>(std::ceil(px + 3.0 * pen)));
        const int y0 = std::max(0, static_cast<int>(std::floor(py - 3.0 * pen)));
        const int y1 = std::min(27, static_cast<int>(std::ceil(py + 3.0 * pen)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
                const double v = 1.25 * std::exp(-d2 / (2.0 * pen * pen));
                double& a = acc[static_cast<size_t>(y) * 28 + x];
                a = std::max(a, v);
            }
        }
    };

    for (const auto& stroke : detail::digit_strokes(cls)) {
        for (size_t i = 0; i + 1 < stroke.size(); ++i) {
            auto [ax, ay] = map_pt(stroke[i].first, stroke[i].second);
            auto [bx, by] = map_pt(stroke[i + 1].first, stroke[i + 1].second);
            const double len = std::hypot(bx - ax, by - ay);
            const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.3)));
            for (int s = 0; s <= steps; ++s) {
                const double t = static_cast<double>(s) / steps;
                stamp(ax + t * (bx - ax), ay + t * (by - ay));
            }
        }
    }

    GrayImage img(28, 28);
    for (size_t i = 0; i < acc.size(); ++i) {
        img.data[i] = static_cast<uint8_t>(std::lround(255.0 * std::min(1.0, acc[i])));
    }
    return img;
}

// Deterministic corpus cycling through the ten classes.
inline std::vector<GrayImage> make_digit_dataset(int count, uint64_t seed) {
    std::vector<GrayImage> out;
    out.reserve(static_cast<size_t>(std::max(0, count)));
    for (int i = 0; i < count; ++i) {
        out.push_back(make_digit(i % 10, derive_seed(seed, 0xD5E7u, static_cast<uint64_t>(i))));
    }
    return out;
}

// Digit source honoring an optional dataset directory: when `data_dir`
// contains MNIST-format IDX images (train-images-idx3-ubyte), the first
// `count` digits are loaded from it; otherwise the procedural corpus is
// generated. Returns 28x28 grayscale images either way.
inline std::vector<GrayImage> load_or_make_digits(int count, uint64_t seed, const std::string& data_dir) {
    if (!data_dir.empty()) {
        const auto p = std::filesystem::path(data_dir) / "train-images-idx3-ubyte";
        if (std::filesystem::exists(p)) {
            auto all = load_idx(read_file(p.string()));
            if (static_cast<int>(all.size()) > count) all.resize(static_cast<size_t>(count));
            if (!all.empty()) return all;
        }
    }
    return make_digit_dataset(count, seed);
}

}  // namespace hbsc
