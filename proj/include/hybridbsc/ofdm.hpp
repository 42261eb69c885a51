// Optional OFDM framing in the 802.11a mold: 64 subcarriers, 48 data + 4
// fixed BPSK pilots, 16-sample cyclic prefix, unitary DFT in both directions
// so framing followed by deframing is the identity on a clean channel.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hbsc {

namespace ofdmdetail {

inline constexpr int kFftSize = 64;
inline constexpr int kCp = 16;
inline constexpr int kDataCarriers = 48;

inline constexpr std::array<int, 4> kPilotOffsets{-21, -7, 7, 21};
inline constexpr std::array<double, 4> kPilotValues{1.0, 1.0, 1.0, -1.0};

inline int bin_of(int offset) { return offset >= 0 ? offset : kFftSize + offset; }

inline const std::array<int, kDataCarriers>& data_bins() {
    static const std::array<int, kDataCarriers> bins = [] {
        std::array<int, kDataCarriers> b{};
        int k = 0;
        for (int off = -26; off <= 26; ++off) {
            if (off == 0) continue;
            bool pilot = false;
            for (int p : kPilotOffsets) pilot |= (off == p);
            if (pilot) continue;
            b[k++] = bin_of(off);
        }
        return b;
    }();
    return bins;
}

// unitary DFT / IDFT, direct evaluation
inline void dft64(const std::complex<double>* in, std::complex<double>* out, bool inverse) {
    const double pi = std::acos(-1.0);
    const double sgn = inverse ? 1.0 : -1.0;
    const double scale = 1.0 / std::sqrt(double(kFftSize));
    for (int k = 0; k < kFftSize; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (int n = 0; n < kFftSize; ++n) {
            double ang = sgn * 2.0 * pi * k * n / kFftSize;
            acc += in[n] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc * scale;
    }
}

}  // namespace ofdmdetail

inline constexpr int ofdm_symbol_len() { return ofdmdetail::kFftSize + ofdmdetail::kCp; }
inline constexpr int ofdm_data_per_symbol() { return ofdmdetail::kDataCarriers; }

// data symbols (length a multiple of 48) -> time samples (80 per OFDM symbol)
inline std::vector<std::complex<double>> ofdm_frame(const std::vector<std::complex<double>>& data) {
    using namespace ofdmdetail;
    if (data.size() % kDataCarriers != 0) throw std::runtime_error("ofdm_frame: data length not a multiple of 48");
    const size_t nsym = data.size() / kDataCarriers;
    std::vector<std::complex<double>> time;
    time.reserve(nsym * ofdm_symbol_len());
    std::array<std::complex<double>, kFftSize> freq{}, td{};
    for (size_t s = 0; s < nsym; ++s) {
        freq.fill({0.0, 0.0});
        const auto& bins = data_bins();
        for (int i = 0; i < kDataCarriers; ++i) freq[bins[i]] = data[s * kDataCarriers + i];
        for (int p = 0; p < 4; ++p) freq[bin_of(kPilotOffsets[p])] = {kPilotValues[p], 0.0};
        dft64(freq.data(), td.data(), true);
        for (int i = kFftSize - kCp; i < kFftSize; ++i) time.push_back(td[i]);  // cyclic prefix
        for (int i = 0; i < kFftSize; ++i) time.push_back(td[i]);
    }
    return time;
}

// time samples -> data symbols (pilot bins are discarded)
inline std::vector<std::complex<double>> ofdm_deframe(const std::vector<std::complex<double>>& time) {
    using namespace ofdmdetail;
    if (time.size() % ofdm_symbol_len() != 0) throw std::runtime_error("ofdm_deframe: length not a multiple of 80");
    const size_t nsym = time.size() / ofdm_symbol_len();
    std::vector<std::complex<double>> data;
    data.reserve(nsym * kDataCarriers);
    std::array<std::complex<double>, kFftSize> freq{};
    for (size_t s = 0; s < nsym; ++s) {
        const std::complex<double>* td = time.data() + s * ofdm_symbol_len() + kCp;
        dft64(td, freq.data(), false);
        const auto& bins = data_bins();
        for (int i = 0; i < kDataCarriers; ++i) data.push_back(freq[bins[i]]);
    }
    return data;
}

// Occupied-bin count of one OFDM symbol's spectrum (for diagnostics/tests).
inline int ofdm_occupied_bins(const std::vector<std::complex<double>>& time, size_t symbol_index,
                              double tol = 1e-9) {
    using namespace ofdmdetail;
    if ((symbol_index + 1) * ofdm_symbol_len() > time.size()) throw std::runtime_error("ofdm_occupied_bins: out of range");
    std::array<std::complex<double>, kFftSize> freq{};
    dft64(time.data() + symbol_index * ofdm_symbol_len() + kCp, freq.data(), false);
    int n = 0;
    for (const auto& v : freq)
        if (std::abs(v) > tol) ++n;
    return n;
}

}  // namespace hbsc
