// Baseline sequential JFIF JPEG codec (4:4:4, 8-bit, restart markers).
//
// The encoder uses a float FDCT and the standard example quantization and
// Huffman tables. The decoder deliberately mirrors the classic integer
// implementation (13-bit fixed-point IDCT, 16-bit fixed-point YCbCr->RGB)
// so its pixel output is bit-compatible with widely deployed decoders.
// Entropy data is decoded per restart segment: a segment that fails to
// decode cleanly is replaced with mid-gray and reported, leaving the rest
// of the image intact.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "image.hpp"
#include "transforms.hpp"

namespace hbsc {

struct JpegConfig {
    int quality = 75;            // 1..100
    int restart_interval = 8;    // MCUs per restart segment, 0 disables
};

// ---------------------------------------------------------------------------
// tables

namespace jpegdetail {

inline constexpr uint8_t kLumaQuant[64] = {
    16, 11, 10, 16, 24, 40, 51, 61,
    12, 12, 14, 19, 26, 58, 60, 55,
    14, 13, 16, 24, 40, 57, 69, 56,
    14, 17, 22, 29, 51, 87, 80, 62,
    18, 22, 37, 56, 68, 109, 103, 77,
    24, 35, 55, 64, 81, 104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr uint8_t kChromaQuant[64] = {
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99};

inline constexpr uint8_t kZigzag[64] = {
    0, 1, 8, 16, 9, 2, 3, 10,
    17, 24, 32, 25, 18, 11, 4, 5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13, 6, 7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63};

struct HuffSpec {
    const uint8_t* bits;  // counts for code lengths 1..16
    const uint8_t* vals;
    int nvals;
};

inline constexpr uint8_t kDcLumaBits[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
inline constexpr uint8_t kDcLumaVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
inline constexpr uint8_t kDcChromaBits[16] = {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
inline constexpr uint8_t kDcChromaVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

inline constexpr uint8_t kAcLumaBits[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d};
inline constexpr uint8_t kAcLumaVals[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5,
    0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8,
    0xf9, 0xfa};

inline constexpr uint8_t kAcChromaBits[16] = {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77};
inline constexpr uint8_t kAcChromaVals[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
    0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0,
    0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26,
    0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
    0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
    0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5,
    0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
    0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
    0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8,
    0xf9, 0xfa};

}  // namespace jpegdetail

// Scales a base quantization table by the usual quality mapping:
// scale = 5000/q for q < 50, else 200 - 2q; entries clamped to [1, 255].
inline std::array<uint16_t, 64> jpeg_scaled_quant(const uint8_t* base, int quality) {
    if (quality < 1 || quality > 100) throw std::runtime_error("jpeg: quality out of range");
    long scale = quality < 50 ? 5000 / quality : 200 - 2L * quality;
    std::array<uint16_t, 64> out{};
    for (int i = 0; i < 64; ++i) {
        long v = (base[i] * scale + 50) / 100;
        out[i] = static_cast<uint16_t>(std::clamp(v, 1L, 255L));
    }
    return out;
}

// ---------------------------------------------------------------------------
// encoder

namespace jpegdetail {

struct HuffEncTable {
    std::array<uint16_t, 256> code{};
    std::array<uint8_t, 256> size{};
};

inline HuffEncTable build_enc_table(const HuffSpec& spec) {
    HuffEncTable t;
    uint16_t code = 0;
    int k = 0;
    for (int l = 1; l <= 16; ++l) {
        for (int i = 0; i < spec.bits[l - 1]; ++i) {
            t.code[spec.vals[k]] = code;
            t.size[spec.vals[k]] = static_cast<uint8_t>(l);
            ++code;
            ++k;
        }
        code = static_cast<uint16_t>(code << 1);
    }
    return t;
}

struct BitWriter {
    std::vector<uint8_t>& out;
    uint32_t acc = 0;
    int nbits = 0;

    explicit BitWriter(std::vector<uint8_t>& o) : out(o) {}

    void put(uint32_t bits, int n) {
        acc = (acc << n) | (bits & ((1u << n) - 1));
        nbits += n;
        while (nbits >= 8) {
            uint8_t byte = static_cast<uint8_t>((acc >> (nbits - 8)) & 0xFF);
            out.push_back(byte);
            if (byte == 0xFF) out.push_back(0x00);  // byte stuffing
            nbits -= 8;
        }
    }
};

inline void flush_bits(BitWriter& bw) {
    if (bw.nbits % 8 != 0) bw.put((1u << (8 - bw.nbits % 8)) - 1, 8 - bw.nbits % 8);
}

inline int bit_category(int v) {
    int a = v < 0 ? -v : v;
    int n = 0;
    while (a) {
        ++n;
        a >>= 1;
    }
    return n;
}

inline void emit_coef(BitWriter& bw, const HuffEncTable& tbl, int symbol, int value, int nbits) {
    bw.put(tbl.code[symbol], tbl.size[symbol]);
    if (nbits > 0) {
        int bits = value >= 0 ? value : value + (1 << nbits) - 1;
        bw.put(static_cast<uint32_t>(bits), nbits);
    }
}

inline void encode_block(BitWriter& bw, const int* coef, int& pred, const HuffEncTable& dc, const HuffEncTable& ac) {
    int diff = coef[0] - pred;
    pred = coef[0];
    int s = bit_category(diff);
    emit_coef(bw, dc, s, diff, s);
    int run = 0;
    for (int k = 1; k < 64; ++k) {
        int v = coef[kZigzag[k]];
        if (v == 0) {
            ++run;
            continue;
        }
        while (run > 15) {
            emit_coef(bw, ac, 0xF0, 0, 0);  // ZRL
            run -= 16;
        }
        int as = bit_category(v);
        emit_coef(bw, ac, (run << 4) | as, v, as);
        run = 0;
    }
    if (run > 0) emit_coef(bw, ac, 0x00, 0, 0);  // EOB
}

inline void put_marker(std::vector<uint8_t>& out, uint8_t m) {
    out.push_back(0xFF);
    out.push_back(m);
}

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

}  // namespace jpegdetail

inline std::vector<uint8_t> jpeg_encode(const RgbImage& img, const JpegConfig& cfg) {
    using namespace jpegdetail;
    if (img.width <= 0 || img.height <= 0 || img.width > 65535 || img.height > 65535)
        throw std::runtime_error("jpeg_encode: bad dimensions");

    auto qy = jpeg_scaled_quant(kLumaQuant, cfg.quality);
    auto qc = jpeg_scaled_quant(kChromaQuant, cfg.quality);

    // full-range JFIF color transform
    const size_t npx = static_cast<size_t>(img.width) * img.height;
    std::vector<uint8_t> py(npx), pcb(npx), pcr(npx);
    for (size_t i = 0; i < npx; ++i) {
        double r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
        py[i] = round_clamp_u8(0.299 * r + 0.587 * g + 0.114 * b);
        pcb[i] = round_clamp_u8(128.0 - 0.168735892 * r - 0.331264108 * g + 0.5 * b);
        pcr[i] = round_clamp_u8(128.0 + 0.5 * r - 0.418687589 * g - 0.081312411 * b);
    }

    std::vector<uint8_t> out;
    put_marker(out, 0xD8);  // SOI
    // APP0 / JFIF
    put_marker(out, 0xE0);
    put_u16(out, 16);
    const char jfif[] = {'J', 'F', 'I', 'F', 0};
    out.insert(out.end(), jfif, jfif + 5);
    out.push_back(1);
    out.push_back(1);  // version 1.1
    out.push_back(0);  // aspect ratio units
    put_u16(out, 1);
    put_u16(out, 1);
    out.push_back(0);
    out.push_back(0);  // no thumbnail
    // DQT (two tables in one segment)
    put_marker(out, 0xDB);
    put_u16(out, 2 + 2 * 65);
    out.push_back(0x00);
    for (int i = 0; i < 64; ++i) out.push_back(static_cast<uint8_t>(qy[kZigzag[i]]));
    out.push_back(0x01);
    for (int i = 0; i < 64; ++i) out.push_back(static_cast<uint8_t>(qc[kZigzag[i]]));
    // SOF0
    put_marker(out, 0xC0);
    put_u16(out, 8 + 3 * 3);
    out.push_back(8);
    put_u16(out, static_cast<uint16_t>(img.height));
    put_u16(out, static_cast<uint16_t>(img.width));
    out.push_back(3);
    const uint8_t comp_q[3] = {0, 1, 1};
    for (int c = 0; c < 3; ++c) {
        out.push_back(static_cast<uint8_t>(c + 1));
        out.push_back(0x11);  // 1x1 sampling
        out.push_back(comp_q[c]);
    }
    // DHT (four tables in one segment)
    {
        put_marker(out, 0xC4);
        const HuffSpec specs[4] = {{kDcLumaBits, kDcLumaVals, 12},
                                   {kAcLumaBits, kAcLumaVals, 162},
                                   {kDcChromaBits, kDcChromaVals, 12},
                                   {kAcChromaBits, kAcChromaVals, 162}};
        const uint8_t ids[4] = {0x00, 0x10, 0x01, 0x11};
        uint16_t len = 2;
        for (const auto& s : specs) len = static_cast<uint16_t>(len + 1 + 16 + s.nvals);
        put_u16(out, len);
        for (int t = 0; t < 4; ++t) {
            out.push_back(ids[t]);
            out.insert(out.end(), specs[t].bits, specs[t].bits + 16);
            out.insert(out.end(), specs[t].vals, specs[t].vals + specs[t].nvals);
        }
    }
    // DRI
    if (cfg.restart_interval > 0) {
        put_marker(out, 0xDD);
        put_u16(out, 4);
        put_u16(out, static_cast<uint16_t>(cfg.restart_interval));
    }
    // SOS
    put_marker(out, 0xDA);
    put_u16(out, 6 + 2 * 3);
    out.push_back(3);
    const uint8_t comp_h[3] = {0x00, 0x11, 0x11};
    for (int c = 0; c < 3; ++c) {
        out.push_back(static_cast<uint8_t>(c + 1));
        out.push_back(comp_h[c]);
    }
    out.push_back(0);
    out.push_back(63);
    out.push_back(0);

    // entropy-coded data
    const HuffEncTable dcl = build_enc_table({kDcLumaBits, kDcLumaVals, 12});
    const HuffEncTable acl = build_enc_table({kAcLumaBits, kAcLumaVals, 162});
    const HuffEncTable dcc = build_enc_table({kDcChromaBits, kDcChromaVals, 12});
    const HuffEncTable acc = build_enc_table({kAcChromaBits, kAcChromaVals, 162});

    const int mcw = (img.width + 7) / 8, mch = (img.height + 7) / 8;
    const long total = static_cast<long>(mcw) * mch;
    BitWriter bw(out);
    int pred[3] = {0, 0, 0};
    int rst_index = 0;
    long since_restart = 0;

    auto encode_plane_block = [&](const std::vector<uint8_t>& plane, int bx, int by,
                                  const std::array<uint16_t, 64>& qt, int& dc_pred,
                                  const HuffEncTable& dct, const HuffEncTable& act) {
        double blk[64], coef[64];
        for (int y = 0; y < 8; ++y) {
            int sy = std::min(by * 8 + y, img.height - 1);
            for (int x = 0; x < 8; ++x) {
                int sx = std::min(bx * 8 + x, img.width - 1);
                blk[y * 8 + x] = double(plane[static_cast<size_t>(sy) * img.width + sx]) - 128.0;
            }
        }
        dct2_block(blk, coef, 8);
        int qcoef[64];
        for (int i = 0; i < 64; ++i) qcoef[i] = static_cast<int>(std::lround(coef[i] / qt[i]));
        encode_block(bw, qcoef, dc_pred, dct, act);
    };

    for (long m = 0; m < total; ++m) {
        if (cfg.restart_interval > 0 && since_restart == cfg.restart_interval) {
            flush_bits(bw);
            put_marker(out, static_cast<uint8_t>(0xD0 + (rst_index & 7)));
            ++rst_index;
            since_restart = 0;
            pred[0] = pred[1] = pred[2] = 0;
        }
        int bx = static_cast<int>(m % mcw), by = static_cast<int>(m / mcw);
        encode_plane_block(py, bx, by, qy, pred[0], dcl, acl);
        encode_plane_block(pcb, bx, by, qc, pred[1], dcc, acc);
        encode_plane_block(pcr, bx, by, qc, pred[2], dcc, acc);
        ++since_restart;
    }
    flush_bits(bw);
    put_marker(out, 0xD9);  // EOI
    return out;
}

// ---------------------------------------------------------------------------
// decoder

struct JpegDecodeResult {
    enum class Status { ok, partial, frame_error };
    Status status = Status::frame_error;
    RgbImage image;
    std::vector<std::pair<long, long>> lost_mcus;  // inclusive MCU index ranges
};

namespace jpegdetail {

// 13-bit fixed-point inverse DCT (two passes, descaled like the classic
// integer implementation so decoded samples match it bit for bit).
inline void idct_islow(const int16_t* coef, const uint16_t* quant, uint8_t* out, int out_stride) {
    constexpr int CONST_BITS = 13, PASS1_BITS = 2;
    constexpr int64_t F_0_298631336 = 2446, F_0_390180644 = 3196, F_0_541196100 = 4433,
                      F_0_765366865 = 6270, F_0_899976223 = 7373, F_1_175875602 = 9633,
                      F_1_501321110 = 12299, F_1_847759065 = 15137, F_1_961570560 = 16069,
                      F_2_053119869 = 16819, F_2_562915447 = 20995, F_3_072711026 = 25172;
    auto descale = [](int64_t x, int n) { return (x + (int64_t(1) << (n - 1))) >> n; };

    int64_t ws[64];
    for (int c = 0; c < 8; ++c) {
        auto deq = [&](int row) { return int64_t(coef[row * 8 + c]) * quant[row * 8 + c]; };
        int64_t z2 = deq(2), z3 = deq(6);
        int64_t z1 = (z2 + z3) * F_0_541196100;
        int64_t t2 = z1 - z3 * F_1_847759065;
        int64_t t3 = z1 + z2 * F_0_765366865;
        z2 = deq(0);
        z3 = deq(4);
        int64_t t0 = (z2 + z3) << CONST_BITS;
        int64_t t1 = (z2 - z3) << CONST_BITS;
        int64_t t10 = t0 + t3, t13 = t0 - t3, t11 = t1 + t2, t12 = t1 - t2;
        t0 = deq(7);
        t1 = deq(5);
        t2 = deq(3);
        t3 = deq(1);
        z1 = t0 + t3;
        z2 = t1 + t2;
        z3 = t0 + t2;
        int64_t z4 = t1 + t3;
        int64_t z5 = (z3 + z4) * F_1_175875602;
        t0 *= F_0_298631336;
        t1 *= F_2_053119869;
        t2 *= F_3_072711026;
        t3 *= F_1_501321110;
        z1 *= -F_0_899976223;
        z2 *= -F_2_562915447;
        z3 = -z3 * F_1_961570560 + z5;
        z4 = -z4 * F_0_390180644 + z5;
        t0 += z1 + z3;
        t1 += z2 + z4;
        t2 += z2 + z3;
        t3 += z1 + z4;
        ws[8 * 0 + c] = descale(t10 + t3, CONST_BITS - PASS1_BITS);
        ws[8 * 7 + c] = descale(t10 - t3, CONST_BITS - PASS1_BITS);
        ws[8 * 1 + c] = descale(t11 + t2, CONST_BITS - PASS1_BITS);
        ws[8 * 6 + c] = descale(t11 - t2, CONST_BITS - PASS1_BITS);
        ws[8 * 2 + c] = descale(t12 + t1, CONST_BITS - PASS1_BITS);
        ws[8 * 5 + c] = descale(t12 - t1, CONST_BITS - PASS1_BITS);
        ws[8 * 3 + c] = descale(t13 + t0, CONST_BITS - PASS1_BITS);
        ws[8 * 4 + c] = descale(t13 - t0, CONST_BITS - PASS1_BITS);
    }
    for (int r = 0; r < 8; ++r) {
        const int64_t* in = ws + r * 8;
        int64_t z2 = in[2], z3 = in[6];
        int64_t z1 = (z2 + z3) * F_0_541196100;
        int64_t t2 = z1 - z3 * F_1_847759065;
        int64_t t3 = z1 + z2 * F_0_765366865;
        int64_t t0 = (in[0] + in[4]) << CONST_BITS;
        int64_t t1 = (in[0] - in[4]) << CONST_BITS;
        int64_t t10 = t0 + t3, t13 = t0 - t3, t11 = t1 + t2, t12 = t1 - t2;
        t0 = in[7];
        t1 = in[5];
        t2 = in[3];
        t3 = in[1];
        z1 = t0 + t3;
        z2 = t1 + t2;
        z3 = t0 + t2;
        int64_t z4 = t1 + t3;
        int64_t z5 = (z3 + z4) * F_1_175875602;
        t0 *= F_0_298631336;
        t1 *= F_2_053119869;
        t2 *= F_3_072711026;
        t3 *= F_1_501321110;
        z1 *= -F_0_899976223;
        z2 *= -F_2_562915447;
        z3 = -z3 * F_1_961570560 + z5;
        z4 = -z4 * F_0_390180644 + z5;
        t0 += z1 + z3;
        t1 += z2 + z4;
        t2 += z2 + z3;
        t3 += z1 + z4;
        auto sample = [&](int64_t v) {
            long s = static_cast<long>(descale(v, CONST_BITS + PASS1_BITS + 3)) + 128;
            return static_cast<uint8_t>(std::clamp(s, 0L, 255L));
        };
        uint8_t* o = out + r * out_stride;
        o[0] = sample(t10 + t3);
        o[7] = sample(t10 - t3);
        o[1] = sample(t11 + t2);
        o[6] = sample(t11 - t2);
        o[2] = sample(t12 + t1);
        o[5] = sample(t12 - t1);
        o[3] = sample(t13 + t0);
        o[4] = sample(t13 - t0);
    }
}

struct HuffDecTable {
    std::array<int, 17> mincode{};
    std::array<long, 17> maxcode{};  // -1 where no codes of that length
    std::array<int, 17> valptr{};
    std::vector<uint8_t> vals;
    bool valid = false;
};

inline HuffDecTable build_dec_table(const uint8_t* bits, const uint8_t* vals, int nvals) {
    HuffDecTable t;
    t.vals.assign(vals, vals + nvals);
    int code = 0, k = 0;
    for (int l = 1; l <= 16; ++l) {
        if (bits[l - 1] > 0) {
            t.valptr[l] = k;
            t.mincode[l] = code;
            code += bits[l - 1];
            k += bits[l - 1];
            t.maxcode[l] = code - 1;
        } else {
            t.maxcode[l] = -1;
        }
        code <<= 1;
    }
    t.valid = true;
    return t;
}

struct BitReader {
    const uint8_t* data;
    size_t size;
    size_t pos = 0;
    uint32_t acc = 0;
    int nbits = 0;
    bool bad = false;

    BitReader(const uint8_t* d, size_t n) : data(d), size(n) {}

    int bit() {
        if (nbits == 0) {
            if (pos >= size) {
                bad = true;
                return 0;
            }
            uint8_t byte = data[pos++];
            if (byte == 0xFF) {
                if (pos >= size || data[pos] != 0x00) {
                    bad = true;  // marker inside entropy data
                    return 0;
                }
                ++pos;
            }
            acc = byte;
            nbits = 8;
        }
        --nbits;
        return (acc >> nbits) & 1;
    }

    int bits(int n) {
        int v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | bit();
        return v;
    }

    // all bytes consumed and any residual bits are 1-padding
    bool clean_end() {
        if (bad) return false;
        for (int i = 0; i < nbits; ++i)
            if (((acc >> i) & 1) == 0) return false;
        return pos == size;
    }
};

inline int huff_decode(BitReader& br, const HuffDecTable& t) {
    long code = br.bit();
    int l = 1;
    while (code > t.maxcode[l]) {
        code = (code << 1) | br.bit();
        if (++l > 16 || br.bad) return -1;
    }
    int idx = t.valptr[l] + static_cast<int>(code - t.mincode[l]);
    if (idx < 0 || idx >= static_cast<int>(t.vals.size())) return -1;
    return t.vals[idx];
}

inline int extend_coef(int v, int nbits) {
    if (nbits == 0) return 0;
    return v < (1 << (nbits - 1)) ? v - (1 << nbits) + 1 : v;
}

}  // namespace jpegdetail

inline JpegDecodeResult jpeg_decode(const std::vector<uint8_t>& bytes) {
    using namespace jpegdetail;
    JpegDecodeResult res;
    if (bytes.size() < 4 || bytes[0] != 0xFF || bytes[1] != 0xD8) return res;  // frame_error

    std::array<std::array<uint16_t, 64>, 4> qtab{};
    std::array<bool, 4> qdef{};
    std::array<HuffDecTable, 4> dc_tab, ac_tab;
    int width = 0, height = 0, ncomp = 0;
    int restart = 0;
    struct CompInfo {
        int id = 0, q = 0, dc = 0, ac = 0;
    };
    std::array<CompInfo, 3> comps;
    bool have_sof = false;
    size_t pos = 2;
    size_t scan_start = 0;

    auto u16at = [&](size_t p) { return (int(bytes[p]) << 8) | bytes[p + 1]; };

    // ---- header parsing ----
    while (true) {
        if (pos + 4 > bytes.size()) return res;
        if (bytes[pos] != 0xFF) return res;
        uint8_t marker = bytes[pos + 1];
        if (marker == 0xFF) {  // fill byte
            ++pos;
            continue;
        }
        pos += 2;
        if (marker == 0xD8 || (marker >= 0xD0 && marker <= 0xD7) || marker == 0x01) continue;  // no payload
        if (marker == 0xD9) return res;                                      // EOI before scan
        if (pos + 2 > bytes.size()) return res;
        int len = u16at(pos);
        if (len < 2 || pos + len > bytes.size()) return res;
        size_t seg = pos + 2, seg_end = pos + len;
        if (marker == 0xDB) {
            while (seg < seg_end) {
                int pq = bytes[seg] >> 4, tq = bytes[seg] & 15;
                ++seg;
                if (pq != 0 || tq > 3 || seg + 64 > seg_end) return res;
                for (int i = 0; i < 64; ++i) qtab[tq][kZigzag[i]] = bytes[seg + i];
                qdef[tq] = true;
                seg += 64;
            }
        } else if (marker == 0xC4) {
            while (seg < seg_end) {
                int tc = bytes[seg] >> 4, th = bytes[seg] & 15;
                ++seg;
                if (tc > 1 || th > 3 || seg + 16 > seg_end) return res;
                int total = 0;
                for (int i = 0; i < 16; ++i) total += bytes[seg + i];
                if (seg + 16 + total > seg_end || total > 256) return res;
                auto t = build_dec_table(&bytes[seg], &bytes[seg + 16], total);
                if (tc == 0)
                    dc_tab[th] = t;
                else
                    ac_tab[th] = t;
                seg += 16 + static_cast<size_t>(total);
            }
        } else if (marker == 0xC0 || marker == 0xC1) {
            if (seg_end - seg < 6) return res;
            if (bytes[seg] != 8) return res;
            height = u16at(seg + 1);
            width = u16at(seg + 3);
            ncomp = bytes[seg + 5];
            if (width <= 0 || height <= 0 || (ncomp != 1 && ncomp != 3)) return res;
            if (seg_end - seg < 6 + static_cast<size_t>(ncomp) * 3) return res;
            for (int c = 0; c < ncomp; ++c) {
                comps[c].id = bytes[seg + 6 + 3 * c];
                if (bytes[seg + 7 + 3 * c] != 0x11) return res;  // 4:4:4 only
                comps[c].q = bytes[seg + 8 + 3 * c];
                if (comps[c].q > 3) return res;
            }
            have_sof = true;
        } else if (marker >= 0xC2 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC) {
            return res;  // non-baseline frame
        } else if (marker == 0xDD) {
            if (len != 4) return res;
            restart = u16at(seg);
        } else if (marker == 0xDA) {
            if (!have_sof) return res;
            if (seg >= seg_end) return res;
            int ns = bytes[seg];
            if (ns != ncomp || seg_end - seg < 1 + static_cast<size_t>(ns) * 2 + 3) return res;
            for (int c = 0; c < ns; ++c) {
                int id = bytes[seg + 1 + 2 * c];
                int tt = bytes[seg + 2 + 2 * c];
                int ci = -1;
                for (int k = 0; k < ncomp; ++k)
                    if (comps[k].id == id) ci = k;
                if (ci != c) return res;  // components in frame order only
                comps[c].dc = tt >> 4;
                comps[c].ac = tt & 15;
                if (comps[c].dc > 3 || comps[c].ac > 3) return res;
            }
            scan_start = seg_end;
            break;
        }
        pos = seg_end;
    }

    for (int c = 0; c < ncomp; ++c) {
        if (!qdef[comps[c].q]) return res;
        if (!dc_tab[comps[c].dc].valid || !ac_tab[comps[c].ac].valid) return res;
    }

    // ---- split entropy data into restart segments ----
    // A restart marker only acts as a segment boundary when its index matches
    // the expected modulo-8 sequence; anything else is left in place for the
    // segment decoder to choke on, which keeps damage attribution local.
    struct Chunk {
        size_t begin, end;
    };
    std::vector<Chunk> chunks;
    size_t cur = scan_start, i = scan_start;
    int next_rst = 0;
    while (i < bytes.size()) {
        if (bytes[i] == 0xFF && i + 1 < bytes.size()) {
            uint8_t m = bytes[i + 1];
            if (m == 0x00) {
                i += 2;
                continue;
            }
            if (m >= 0xD0 && m <= 0xD7) {
                if (restart > 0 && (m & 7) == (next_rst & 7)) {
                    chunks.push_back({cur, i});
                    cur = i + 2;
                    ++next_rst;
                }
                i += 2;
                continue;
            }
            break;  // EOI or another marker terminates the scan
        }
        ++i;
    }
    chunks.push_back({cur, std::min(i, bytes.size())});

    const int mcw = (width + 7) / 8, mch = (height + 7) / 8;
    const long total = static_cast<long>(mcw) * mch;
    const long per_seg = restart > 0 ? restart : total;

    const size_t npx = static_cast<size_t>(width) * height;
    std::vector<std::vector<uint8_t>> planes(ncomp, std::vector<uint8_t>(npx, 128));

    auto decode_chunk = [&](const Chunk& ck, long mcu0, long nmcus) -> bool {
        BitReader br(bytes.data() + ck.begin, ck.end - ck.begin);
        int pred[3] = {0, 0, 0};
        // stage into temporaries so failed chunks leave the planes untouched
        std::vector<std::array<int16_t, 64>> stage(static_cast<size_t>(nmcus) * ncomp);
        for (long m = 0; m < nmcus; ++m) {
            for (int c = 0; c < ncomp; ++c) {
                auto& blk = stage[static_cast<size_t>(m) * ncomp + c];
                blk.fill(0);
                int s = huff_decode(br, dc_tab[comps[c].dc]);
                if (s < 0 || s > 11) return false;
                int diff = extend_coef(br.bits(s), s);
                if (br.bad) return false;
                pred[c] += diff;
                blk[0] = static_cast<int16_t>(pred[c]);
                int k = 1;
                while (k < 64) {
                    int rs = huff_decode(br, ac_tab[comps[c].ac]);
                    if (rs < 0) return false;
                    int r = rs >> 4, sz = rs & 15;
                    if (sz == 0) {
                        if (r == 15) {
                            k += 16;
                            continue;
                        }
                        break;  // EOB
                    }
                    k += r;
                    if (k > 63) return false;
                    blk[kZigzag[k]] = static_cast<int16_t>(extend_coef(br.bits(sz), sz));
                    if (br.bad) return false;
                    ++k;
                }
            }
        }
        if (!br.clean_end()) return false;
        // commit
        for (long m = 0; m < nmcus; ++m) {
            long mcu = mcu0 + m;
            int bx = static_cast<int>(mcu % mcw), by = static_cast<int>(mcu / mcw);
            for (int c = 0; c < ncomp; ++c) {
                uint8_t tile[64];
                idct_islow(stage[static_cast<size_t>(m) * ncomp + c].data(), qtab[comps[c].q].data(), tile, 8);
                for (int y = 0; y < 8; ++y) {
                    int py = by * 8 + y;
                    if (py >= height) break;
                    for (int x = 0; x < 8; ++x) {
                        int px = bx * 8 + x;
                        if (px >= width) break;
                        planes[c][static_cast<size_t>(py) * width + px] = tile[y * 8 + x];
                    }
                }
            }
        }
        return true;
    };

    std::vector<std::pair<long, long>> lost;
    long done = 0;
    for (size_t ci = 0; ci < chunks.size() && done < total; ++ci) {
        long n = std::min(per_seg, total - done);
        if (!decode_chunk(chunks[ci], done, n)) lost.emplace_back(done, done + n - 1);
        done += n;
    }
    if (done < total) lost.emplace_back(done, total - 1);  // truncated stream

    // merge adjacent ranges
    std::vector<std::pair<long, long>> merged;
    for (auto& r : lost) {
        if (!merged.empty() && merged.back().second + 1 == r.first)
            merged.back().second = r.second;
        else
            merged.push_back(r);
    }

    // ---- fixed-point YCbCr -> RGB (16-bit scale, round-half-up) ----
    res.image = RgbImage(width, height);
    if (ncomp == 3) {
        for (size_t p = 0; p < npx; ++p) {
            int y = planes[0][p], cb = planes[1][p] - 128, cr = planes[2][p] - 128;
            int r = y + ((91881 * cr + 32768) >> 16);
            int g = y + ((-22554 * cb - 46802 * cr + 32768) >> 16);
            int b = y + ((116130 * cb + 32768) >> 16);
            res.image.data[3 * p] = static_cast<uint8_t>(std::clamp(r, 0, 255));
            res.image.data[3 * p + 1] = static_cast<uint8_t>(std::clamp(g, 0, 255));
            res.image.data[3 * p + 2] = static_cast<uint8_t>(std::clamp(b, 0, 255));
        }
    } else {
        for (size_t p = 0; p < npx; ++p) {
            res.image.data[3 * p] = res.image.data[3 * p + 1] = res.image.data[3 * p + 2] = planes[0][p];
        }
    }
    res.lost_mcus = std::move(merged);
    res.status = res.lost_mcus.empty() ? JpegDecodeResult::Status::ok : JpegDecodeResult::Status::partial;
    return res;
}

}  // namespace hbsc
