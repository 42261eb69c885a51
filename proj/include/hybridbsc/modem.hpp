// Gray-mapped square constellations (QPSK, 16-QAM, 64-QAM) with unit average
// energy, plus max-log LLR demapping. The per-axis bit groups are independent,
// so LLRs reduce to one-dimensional nearest-level searches.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbsc {

enum class Scheme { qpsk, qam16, qam64 };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::qpsk: return "qpsk";
        case Scheme::qam16: return "16qam";
        case Scheme::qam64: return "64qam";
    }
    return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
    if (s == "qpsk") return Scheme::qpsk;
    if (s == "16qam" || s == "qam16") return Scheme::qam16;
    if (s == "64qam" || s == "qam64") return Scheme::qam64;
    throw std::runtime_error("unknown modulation: " + s);
}

struct Modulation {
    Scheme scheme;
    int bits_per_symbol;
    int axis_bits;            // bits per I/Q axis
    double scale;             // normalizes average symbol energy to 1
    std::vector<int> levels;  // axis label value -> PAM level

    static Modulation make(Scheme s) {
        switch (s) {
            case Scheme::qpsk:
                return {s, 2, 1, 1.0 / std::sqrt(2.0), {+1, -1}};
            case Scheme::qam16:
                // Gray: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
                return {s, 4, 2, 1.0 / std::sqrt(10.0), {-3, -1, +3, +1}};
            case Scheme::qam64:
                // Gray: 000,001,011,010,110,111,101,100 -> -7..+7
                return {s, 6, 3, 1.0 / std::sqrt(42.0), {-7, -5, -1, -3, +7, +5, +1, +3}};
        }
        throw std::runtime_error("unknown scheme");
    }
};

// Constellation point for an integer label whose MSB is the first bit.
inline std::complex<double> constellation_point(const Modulation& m, unsigned label) {
    unsigned vi = label >> m.axis_bits;
    unsigned vq = label & ((1u << m.axis_bits) - 1);
    return {m.scale * m.levels[vi], m.scale * m.levels[vq]};
}

inline std::vector<std::complex<double>> modulate(const std::vector<uint8_t>& bits, const Modulation& m) {
    if (bits.size() % m.bits_per_symbol != 0)
        throw std::runtime_error("modulate: bit count not divisible by bits per symbol");
    std::vector<std::complex<double>> out;
    out.reserve(bits.size() / m.bits_per_symbol);
    for (size_t i = 0; i < bits.size(); i += m.bits_per_symbol) {
        unsigned label = 0;
        for (int j = 0; j < m.bits_per_symbol; ++j) label = (label << 1) | bits[i + j];
        out.push_back(constellation_point(m, label));
    }
    return out;
}

// Max-log LLRs, positive when bit 0 is more likely. noise_var is the
// post-equalization noise variance per symbol; infinity marks an erasure.
inline std::vector<double> demodulate_llr(const std::vector<std::complex<double>>& syms,
                                          const std::vector<double>& noise_var, const Modulation& m) {
    if (syms.size() != noise_var.size()) throw std::runtime_error("demodulate_llr: length mismatch");
    constexpr double kMaxLlr = 300.0;
    const int nb = m.axis_bits;
    const int nlev = 1 << nb;
    std::vector<double> llr;
    llr.reserve(syms.size() * m.bits_per_symbol);
    for (size_t s = 0; s < syms.size(); ++s) {
        const double var = noise_var[s];
        for (int axis = 0; axis < 2; ++axis) {
            double u = axis == 0 ? syms[s].real() : syms[s].imag();
            for (int j = 0; j < nb; ++j) {  // j = 0 is the group MSB
                double d0 = std::numeric_limits<double>::infinity();
                double d1 = std::numeric_limits<double>::infinity();
                for (int v = 0; v < nlev; ++v) {
                    double d = u - m.scale * m.levels[v];
                    d *= d;
                    if ((v >> (nb - 1 - j)) & 1)
                        d1 = std::min(d1, d);
                    else
                        d0 = std::min(d0, d);
                }
                double metric = d1 - d0;
                double v;
                if (std::isinf(var))
                    v = 0.0;  // erased symbol carries no information
                else if (var < 1e-30)
                    v = metric > 0 ? kMaxLlr : (metric < 0 ? -kMaxLlr : 0.0);
                else
                    v = std::clamp(metric / var, -kMaxLlr, kMaxLlr);
                llr.push_back(v);
            }
        }
    }
    return llr;
}

inline std::vector<double> demodulate_llr(const std::vector<std::complex<double>>& syms, double noise_var,
                                          const Modulation& m) {
    return demodulate_llr(syms, std::vector<double>(syms.size(), noise_var), m);
}

// Nearest-point hard decisions (per axis).
inline std::vector<uint8_t> hard_demap(const std::vector<std::complex<double>>& syms, const Modulation& m) {
    const int nb = m.axis_bits;
    const int nlev = 1 << nb;
    std::vector<uint8_t> bits;
    bits.reserve(syms.size() * m.bits_per_symbol);
    for (const auto& y : syms) {
        for (int axis = 0; axis < 2; ++axis) {
            double u = axis == 0 ? y.real() : y.imag();
            int best = 0;
            double bestd = std::numeric_limits<double>::infinity();
            for (int v = 0; v < nlev; ++v) {
                double d = u - m.scale * m.levels[v];
                d *= d;
                if (d < bestd) {
                    bestd = d;
                    best = v;
                }
            }
            for (int j = nb - 1; j >= 0; --j) bits.push_back(static_cast<uint8_t>((best >> j) & 1));
        }
    }
    return bits;
}

}  // namespace hbsc
