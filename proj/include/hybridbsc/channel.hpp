// Memoryless channel models (AWGN and flat Rayleigh fading) with genie-aided
// zero-forcing equalization. SNR is Es/N0 on unit-energy symbols; noise is
// circular complex Gaussian drawn from the deterministic Box-Muller source.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace hbsc {

enum class ChannelKind { awgn, rayleigh };

inline const char* channel_name(ChannelKind k) { return k == ChannelKind::awgn ? "awgn" : "rayleigh"; }

inline ChannelKind channel_from_name(const std::string& s) {
    if (s == "awgn") return ChannelKind::awgn;
    if (s == "rayleigh") return ChannelKind::rayleigh;
    throw std::runtime_error("unknown channel: " + s);
}

struct ChannelOutput {
    std::vector<std::complex<double>> y;  // received symbols
    std::vector<std::complex<double>> h;  // per-symbol gain (1 for AWGN)
    double noise_variance = 0.0;          // N0 (total complex noise power)
};

inline double snr_db_to_noise_var(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return std::pow(10.0, -snr_db / 10.0);
}

inline ChannelOutput apply_channel(const std::vector<std::complex<double>>& x, ChannelKind kind,
                                   double snr_db, uint64_t seed) {
    ChannelOutput out;
    out.noise_variance = snr_db_to_noise_var(snr_db);
    out.y.resize(x.size());
    out.h.assign(x.size(), {1.0, 0.0});
    Rng rng(derive_seed(seed, 0xC4A2ull, static_cast<uint64_t>(kind)));
    const double nscale = std::sqrt(out.noise_variance / 2.0);
    for (size_t i = 0; i < x.size(); ++i) {
        std::complex<double> hx = x[i];
        if (kind == ChannelKind::rayleigh) {
            double a, b;
            rng.gaussian_pair(a, b);
            out.h[i] = {a / std::sqrt(2.0), b / std::sqrt(2.0)};  // unit average power
            hx *= out.h[i];
        }
        if (nscale > 0.0) {
            double n0, n1;
            rng.gaussian_pair(n0, n1);
            hx += std::complex<double>(nscale * n0, nscale * n1);
        }
        out.y[i] = hx;
    }
    return out;
}

// Applies one gain to a whole block (used for OFDM symbols in block fading).
inline ChannelOutput apply_channel_block(const std::vector<std::complex<double>>& x, ChannelKind kind,
                                         double snr_db, uint64_t seed, size_t block_len,
                                         std::vector<std::complex<double>>* block_gains = nullptr) {
    ChannelOutput out;
    out.noise_variance = snr_db_to_noise_var(snr_db);
    out.y.resize(x.size());
    out.h.assign(x.size(), {1.0, 0.0});
    Rng rng(derive_seed(seed, 0xC4A2ull, static_cast<uint64_t>(kind)));
    const double nscale = std::sqrt(out.noise_variance / 2.0);
    std::complex<double> h{1.0, 0.0};
    if (block_gains) block_gains->clear();
    for (size_t i = 0; i < x.size(); ++i) {
        if (i % block_len == 0) {
            if (kind == ChannelKind::rayleigh) {
                double a, b;
                rng.gaussian_pair(a, b);
                h = {a / std::sqrt(2.0), b / std::sqrt(2.0)};
            }
            if (block_gains) block_gains->push_back(h);
        }
        out.h[i] = h;
        std::complex<double> hx = x[i] * h;
        if (nscale > 0.0) {
            double n0, n1;
            rng.gaussian_pair(n0, n1);
            hx += std::complex<double>(nscale * n0, nscale * n1);
        }
        out.y[i] = hx;
    }
    return out;
}

struct Equalized {
    std::vector<std::complex<double>> xhat;
    std::vector<double> noise_var;  // per-symbol post-equalization variance
};

inline Equalized equalize(const ChannelOutput& ch) {
    Equalized eq;
    eq.xhat.resize(ch.y.size());
    eq.noise_var.resize(ch.y.size());
    for (size_t i = 0; i < ch.y.size(); ++i) {
        double mag2 = std::norm(ch.h[i]);
        if (mag2 < 1e-24) {  // |h| < 1e-12: erase rather than amplify garbage
            eq.xhat[i] = {0.0, 0.0};
            eq.noise_var[i] = std::numeric_limits<double>::infinity();
        } else {
            eq.xhat[i] = ch.y[i] / ch.h[i];
            eq.noise_var[i] = ch.noise_variance / mag2;
        }
    }
    return eq;
}

}  // namespace hbsc
