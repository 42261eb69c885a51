// Full-reference quality metrics: PSNR and single-scale SSIM.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "image.hpp"

namespace hbsc {

inline double mse(const RgbImage& a, const RgbImage& b) {
    if (!a.same_dims(b)) throw std::runtime_error("mse: dimension mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = double(a.data[i]) - double(b.data[i]);
        acc += d * d;
    }
    return acc / double(a.data.size());
}

inline double mse(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height) throw std::runtime_error("mse: dimension mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = double(a.data[i]) - double(b.data[i]);
        acc += d * d;
    }
    return acc / double(a.data.size());
}

inline double psnr_from_mse(double m) {
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

inline double psnr(const RgbImage& a, const RgbImage& b) { return psnr_from_mse(mse(a, b)); }
inline double psnr(const GrayImage& a, const GrayImage& b) { return psnr_from_mse(mse(a, b)); }

// ---------------------------------------------------------------------------
// SSIM with an 11x11 Gaussian window (sigma 1.5), valid-region averaging,
// K1 = 0.01, K2 = 0.03 on a 255 dynamic range.

namespace detail {

inline const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> v(11);
        double sum = 0.0;
        for (int i = 0; i < 11; ++i) {
            double d = i - 5.0;
            v[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            sum += v[i];
        }
        for (auto& x : v) x /= sum;  // separable halves of a normalized 2-D window
        return v;
    }();
    return w;
}

// horizontal then vertical valid-mode filtering with the 11-tap window
inline Plane filter_valid(const Plane& src) {
    const auto& w = ssim_window();
    const int k = 11, r = k / 2;
    if (src.width < k || src.height < k) throw std::runtime_error("ssim: image smaller than window");
    Plane tmp(src.width - 2 * r, src.height);
    for (int y = 0; y < src.height; ++y) {
        const double* in = src.row(y);
        double* out = tmp.row(y);
        for (int x = 0; x < tmp.width; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += w[i] * in[x + i];
            out[x] = acc;
        }
    }
    Plane dst(tmp.width, src.height - 2 * r);
    for (int y = 0; y < dst.height; ++y) {
        double* out = dst.row(y);
        for (int x = 0; x < dst.width; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += w[i] * tmp.at(x, y + i);
            out[x] = acc;
        }
    }
    return dst;
}

}  // namespace detail

inline double ssim(const Plane& a, const Plane& b) {
    if (!a.same_dims(b)) throw std::runtime_error("ssim: dimension mismatch");
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    Plane a2(a.width, a.height), b2(a.width, a.height), ab(a.width, a.height);
    for (size_t i = 0; i < a.data.size(); ++i) {
        a2.data[i] = a.data[i] * a.data[i];
        b2.data[i] = b.data[i] * b.data[i];
        ab.data[i] = a.data[i] * b.data[i];
    }
    Plane mu_a = detail::filter_valid(a);
    Plane mu_b = detail::filter_valid(b);
    Plane m_a2 = detail::filter_valid(a2);
    Plane m_b2 = detail::filter_valid(b2);
    Plane m_ab = detail::filter_valid(ab);

    double acc = 0.0;
    for (size_t i = 0; i < mu_a.data.size(); ++i) {
        double ma = mu_a.data[i], mb = mu_b.data[i];
        double va = m_a2.data[i] - ma * ma;
        double vb = m_b2.data[i] - mb * mb;
        double cov = m_ab.data[i] - ma * mb;
        acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return acc / double(mu_a.data.size());
}

inline double ssim(const GrayImage& a, const GrayImage& b) {
    return ssim(gray_to_plane(a), gray_to_plane(b));
}

// Color inputs are compared on the luminance plane.
inline double ssim(const RgbImage& a, const RgbImage& b) {
    if (!a.same_dims(b)) throw std::runtime_error("ssim: dimension mismatch");
    return ssim(rgb_to_ycbcr(a).y, rgb_to_ycbcr(b).y);
}

}  // namespace hbsc
