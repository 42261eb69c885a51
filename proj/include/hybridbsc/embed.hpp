// Feature quantization and QIM embedding of payload bits into the largest
// singular value of 4x4 DCT blocks taken over the carrier's LL subband.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "image.hpp"
#include "transforms.hpp"

namespace hbsc {

// Semantic feature map, row-major (y, x, channel), values nominally in [0, 1].
struct FeatureTensor {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> v;

    FeatureTensor() = default;
    FeatureTensor(int h, int w, int c) : height(h), width(w), channels(c), v(static_cast<size_t>(h) * w * c, 0.0) {}
    size_t size() const { return v.size(); }
};

struct QuantizedPayload {
    std::vector<uint8_t> bits;  // one bit per element, MSB of each code first
    int feat_height = 0;
    int feat_width = 0;
    int feat_channels = 1;
};

struct EmbedConfig {
    double alpha = 14.0;  // insertion factor (QIM step)
    int q = 4;            // bits per feature value
    // When set, embedded singular values sit mid-cell (alpha*eta - alpha/2)
    // instead of exactly on the lattice point alpha*eta, buying alpha/2 worth
    // of robustness against pixel quantization. Extraction is unchanged.
    bool midpoint = false;
};

// ---------------------------------------------------------------------------
// scalar quantizer: q-bit uniform over [0, 1] with reconstruction levels
// k / (2^q - 1), so 0.0 and 1.0 survive the round trip exactly. Feature maps
// of mostly-dark images concentrate at the clamp rails; a grid that cannot
// represent the rails would shift the entire background by half a step and
// the decoder network would amplify that coherent bias into visible ripple.

inline QuantizedPayload quantize_features(const FeatureTensor& f, int q) {
    if (q < 1 || q > 16) throw std::runtime_error("quantize_features: q out of range");
    const int levels = 1 << q;
    QuantizedPayload p;
    p.feat_height = f.height;
    p.feat_width = f.width;
    p.feat_channels = f.channels;
    p.bits.reserve(f.size() * q);
    for (double x : f.v) {
        int k = static_cast<int>(std::lround(x * (levels - 1)));
        if (k < 0) k = 0;
        if (k > levels - 1) k = levels - 1;
        for (int j = q - 1; j >= 0; --j) p.bits.push_back(static_cast<uint8_t>((k >> j) & 1));
    }
    return p;
}

inline FeatureTensor dequantize_features(const QuantizedPayload& p, int q) {
    if (q < 1 || q > 16) throw std::runtime_error("dequantize_features: q out of range");
    if (p.bits.size() % q != 0) throw std::runtime_error("dequantize_features: bit count not divisible by q");
    const int levels = 1 << q;
    FeatureTensor f(p.feat_height, p.feat_width, p.feat_channels);
    if (f.size() * q != p.bits.size()) throw std::runtime_error("dequantize_features: shape/bit count mismatch");
    for (size_t i = 0; i < f.size(); ++i) {
        int k = 0;
        for (int j = 0; j < q; ++j) k = (k << 1) | p.bits[i * q + j];
        f.v[i] = static_cast<double>(k) / (levels - 1);
    }
    return f;
}

// ---------------------------------------------------------------------------
// QIM on a non-negative scalar. eta = ceil(sigma/alpha); bit 0 moves sigma to
// the nearest odd lattice index at or above eta, bit 1 to the nearest even one.

inline double qim_embed(double sigma, int bit, double alpha, bool midpoint = false) {
    if (alpha <= 0.0) throw std::runtime_error("qim_embed: alpha must be positive");
    if (sigma < 0.0) throw std::runtime_error("qim_embed: sigma must be non-negative");
    long long eta = static_cast<long long>(std::ceil(sigma / alpha));
    long long target;
    if (bit == 0)
        target = (eta % 2 != 0) ? eta : eta + 1;
    else
        target = (eta % 2 == 0) ? eta : eta + 1;
    double out = alpha * static_cast<double>(target);
    if (midpoint) out -= alpha / 2.0;
    return out < 0.0 ? 0.0 : out;
}

inline int qim_extract(double sigma, double alpha) {
    if (alpha <= 0.0) throw std::runtime_error("qim_extract: alpha must be positive");
    // tiny guard so values that should sit exactly on a lattice point do not
    // spill into the next cell through floating-point dust
    long long eta = static_cast<long long>(std::ceil(sigma / alpha - 1e-9));
    return (eta % 2 == 0) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// capacity: one bit per 4x4 block of the LL subband

inline long capacity_bits(int width, int height) {
    if (width <= 0 || height <= 0 || width % 8 != 0 || height % 8 != 0)
        throw std::runtime_error("capacity_bits: dimensions must be positive multiples of 8");
    return (static_cast<long>(width) / 8) * (static_cast<long>(height) / 8);
}

// ---------------------------------------------------------------------------
// plane-level embed/extract (real-valued, no 8-bit materialization)

struct InsertStats {
    long blocks_embedded = 0;
    long z0_below_z1 = 0;  // blocks where the modified sigma dropped below z[1]
};

inline void embed_bits_in_y(Plane& y, const std::vector<uint8_t>& bits, const EmbedConfig& cfg,
                            InsertStats* stats = nullptr) {
    if (y.width % 8 != 0 || y.height % 8 != 0)
        throw std::runtime_error("embed_bits_in_y: dimensions must be multiples of 8");
    Subbands sb = dwt2_haar(y);
    const int bw = sb.ll.width / 4, bh = sb.ll.height / 4;
    if (bits.size() > static_cast<size_t>(bw) * bh) throw std::runtime_error("embed_bits_in_y: payload exceeds capacity");
    size_t bi = 0;
    for (int by = 0; by < bh && bi < bits.size(); ++by)
        for (int bx = 0; bx < bw && bi < bits.size(); ++bx, ++bi) {
            double blk[16], coef[16];
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) blk[r * 4 + c] = sb.ll.at(bx * 4 + c, by * 4 + r);
            dct2_block(blk, coef, 4);
            BlockSvd sv = svd_4x4(coef);
            double nz = qim_embed(sv.z[0], bits[bi], cfg.alpha, cfg.midpoint);
            if (stats) {
                ++stats->blocks_embedded;
                if (nz < sv.z[1]) ++stats->z0_below_z1;
            }
            sv.z[0] = nz;
            reconstruct_svd(sv, coef);
            idct2_block(coef, blk, 4);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) sb.ll.at(bx * 4 + c, by * 4 + r) = blk[r * 4 + c];
        }
    y = idwt2_haar(sb);
}

inline std::vector<uint8_t> extract_bits_from_y(const Plane& y, size_t nbits, const EmbedConfig& cfg) {
    if (y.width % 8 != 0 || y.height % 8 != 0)
        throw std::runtime_error("extract_bits_from_y: dimensions must be multiples of 8");
    Subbands sb = dwt2_haar(y);
    const int bw = sb.ll.width / 4, bh = sb.ll.height / 4;
    if (nbits > static_cast<size_t>(bw) * bh) throw std::runtime_error("extract_bits_from_y: request exceeds capacity");
    std::vector<uint8_t> bits;
    bits.reserve(nbits);
    for (int by = 0; by < bh && bits.size() < nbits; ++by)
        for (int bx = 0; bx < bw && bits.size() < nbits; ++bx) {
            double blk[16], coef[16];
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) blk[r * 4 + c] = sb.ll.at(bx * 4 + c, by * 4 + r);
            dct2_block(blk, coef, 4);
            BlockSvd sv = svd_4x4(coef);
            bits.push_back(static_cast<uint8_t>(qim_extract(sv.z[0], cfg.alpha)));
        }
    return bits;
}

// ---------------------------------------------------------------------------
// image-level insert/extract: color conversion + Y-plane embedding; chroma
// planes pass through untouched

inline Plane materialize_y(const Plane& y) {
    Plane out(y.width, y.height);
    for (size_t i = 0; i < y.data.size(); ++i) out.data[i] = round_clamp_u8(y.data[i]);
    return out;
}

inline RgbImage insert_payload(const RgbImage& carrier, const QuantizedPayload& payload, const EmbedConfig& cfg,
                               InsertStats* stats = nullptr) {
    long cap = capacity_bits(carrier.width, carrier.height);
    if (static_cast<long>(payload.bits.size()) > cap) throw std::runtime_error("insert_payload: payload exceeds capacity");
    YcbcrPlanes p = rgb_to_ycbcr(carrier);
    embed_bits_in_y(p.y, payload.bits, cfg, stats);
    return ycbcr_to_rgb(materialize_y(p.y), p.cb, p.cr);
}

inline std::vector<uint8_t> extract_payload_bits(const RgbImage& hybrid, size_t nbits, const EmbedConfig& cfg) {
    YcbcrPlanes p = rgb_to_ycbcr(hybrid);
    return extract_bits_from_y(p.y, nbits, cfg);
}

// ---------------------------------------------------------------------------
// byte-oriented payload framing: 32-bit big-endian bit count, then the bits
// packed MSB-first and zero-padded to a byte boundary

inline std::vector<uint8_t> pack_bits(const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    return out;
}

inline std::vector<uint8_t> unpack_bits(const std::vector<uint8_t>& bytes, size_t nbits) {
    if (nbits > bytes.size() * 8) throw std::runtime_error("unpack_bits: not enough bytes");
    std::vector<uint8_t> bits(nbits);
    for (size_t i = 0; i < nbits; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
    return bits;
}

inline std::vector<uint8_t> frame_payload(const std::vector<uint8_t>& bits) {
    uint32_t n = static_cast<uint32_t>(bits.size());
    std::vector<uint8_t> out{uint8_t(n >> 24), uint8_t(n >> 16), uint8_t(n >> 8), uint8_t(n)};
    auto packed = pack_bits(bits);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

inline std::vector<uint8_t> unframe_payload(const std::vector<uint8_t>& framed) {
    if (framed.size() < 4) throw std::runtime_error("unframe_payload: truncated header");
    uint32_t n = (uint32_t(framed[0]) << 24) | (uint32_t(framed[1]) << 16) | (uint32_t(framed[2]) << 8) | framed[3];
    if (framed.size() < 4 + (static_cast<size_t>(n) + 7) / 8) throw std::runtime_error("unframe_payload: truncated body");
    return unpack_bits(std::vector<uint8_t>(framed.begin() + 4, framed.end()), n);
}

}  // namespace hbsc
