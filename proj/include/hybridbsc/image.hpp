// Image containers, PPM/PGM/IDX ingestion and BT.601 color-space conversion.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbsc {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // interleaved R,G,B, row-major

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

    uint8_t* px(int x, int y) { return data.data() + 3 * (static_cast<size_t>(y) * width + x); }
    const uint8_t* px(int x, int y) const { return data.data() + 3 * (static_cast<size_t>(y) * width + x); }

    bool same_dims(const RgbImage& o) const { return width == o.width && height == o.height; }
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // row-major

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {}

    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Real-valued single-channel plane; carries exact values between transform stages.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    double* row(int y) { return data.data() + static_cast<size_t>(y) * width; }
    const double* row(int y) const { return data.data() + static_cast<size_t>(y) * width; }

    bool same_dims(const Plane& o) const { return width == o.width && height == o.height; }
};

// ---------------------------------------------------------------------------
// PPM (P6) / PGM (P5), binary, maxval 255

namespace detail {

inline int pnm_next_token(const std::vector<uint8_t>& b, size_t& pos, std::string& tok) {
    // skip whitespace and '#' comments
    while (pos < b.size()) {
        uint8_t c = b[pos];
        if (c == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    tok.clear();
    while (pos < b.size()) {
        uint8_t c = b[pos];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
        tok.push_back(static_cast<char>(c));
        ++pos;
    }
    return tok.empty() ? -1 : 0;
}

inline long pnm_int(const std::vector<uint8_t>& b, size_t& pos, const char* what) {
    std::string tok;
    if (pnm_next_token(b, pos, tok) != 0) throw std::runtime_error(std::string("pnm: malformed header, missing ") + what);
    for (char c : tok)
        if (c < '0' || c > '9') throw std::runtime_error(std::string("pnm: malformed header, bad ") + what);
    return std::stol(tok);
}

inline size_t pnm_header(const std::vector<uint8_t>& bytes, const char* magic, int& w, int& h) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != magic[1])
        throw std::runtime_error("pnm: malformed header, bad magic");
    size_t pos = 2;
    long lw = pnm_int(bytes, pos, "width");
    long lh = pnm_int(bytes, pos, "height");
    long maxval = pnm_int(bytes, pos, "maxval");
    if (lw <= 0 || lh <= 0) throw std::runtime_error("pnm: malformed header, bad dimensions");
    if (maxval != 255) throw std::runtime_error("pnm: unsupported maxval");
    if (pos >= bytes.size()) throw std::runtime_error("pnm: truncated payload");
    ++pos;  // single whitespace byte after maxval
    w = static_cast<int>(lw);
    h = static_cast<int>(lh);
    return pos;
}

}  // namespace detail

inline RgbImage load_ppm(const std::vector<uint8_t>& bytes) {
    int w = 0, h = 0;
    size_t pos = detail::pnm_header(bytes, "P6", w, h);
    size_t need = static_cast<size_t>(w) * h * 3;
    if (bytes.size() - pos < need) throw std::runtime_error("ppm: truncated payload");
    RgbImage img(w, h);
    std::copy_n(bytes.begin() + static_cast<long>(pos), need, img.data.begin());
    return img;
}

inline std::vector<uint8_t> save_ppm(const RgbImage& img) {
    char hdr[64];
    int n = std::snprintf(hdr, sizeof(hdr), "P6\n%d %d\n255\n", img.width, img.height);
    std::vector<uint8_t> out(hdr, hdr + n);
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

inline GrayImage load_pgm(const std::vector<uint8_t>& bytes) {
    int w = 0, h = 0;
    size_t pos = detail::pnm_header(bytes, "P5", w, h);
    size_t need = static_cast<size_t>(w) * h;
    if (bytes.size() - pos < need) throw std::runtime_error("pgm: truncated payload");
    GrayImage img(w, h);
    std::copy_n(bytes.begin() + static_cast<long>(pos), need, img.data.begin());
    return img;
}

inline std::vector<uint8_t> save_pgm(const GrayImage& img) {
    char hdr[64];
    int n = std::snprintf(hdr, sizeof(hdr), "P5\n%d %d\n255\n", img.width, img.height);
    std::vector<uint8_t> out(hdr, hdr + n);
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

inline std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

inline RgbImage load_ppm_file(const std::string& path) { return load_ppm(read_file(path)); }
inline void save_ppm_file(const std::string& path, const RgbImage& img) { write_file(path, save_ppm(img)); }
inline GrayImage load_pgm_file(const std::string& path) { return load_pgm(read_file(path)); }
inline void save_pgm_file(const std::string& path, const GrayImage& img) { write_file(path, save_pgm(img)); }

// ---------------------------------------------------------------------------
// IDX3 image files (MNIST), big-endian, magic 0x00000803

inline std::vector<GrayImage> load_idx(const std::vector<uint8_t>& bytes) {
    auto be32 = [&](size_t off) -> uint32_t {
        return (uint32_t(bytes[off]) << 24) | (uint32_t(bytes[off + 1]) << 16) |
               (uint32_t(bytes[off + 2]) << 8) | uint32_t(bytes[off + 3]);
    };
    if (bytes.size() < 16) throw std::runtime_error("idx: truncated payload");
    if (be32(0) != 0x00000803u) throw std::runtime_error("idx: bad magic");
    uint32_t count = be32(4), rows = be32(8), cols = be32(12);
    size_t need = 16 + static_cast<size_t>(count) * rows * cols;
    if (bytes.size() < need) throw std::runtime_error("idx: truncated payload");
    std::vector<GrayImage> out;
    out.reserve(count);
    size_t pos = 16;
    for (uint32_t i = 0; i < count; ++i) {
        GrayImage g(static_cast<int>(cols), static_cast<int>(rows));
        std::copy_n(bytes.begin() + static_cast<long>(pos), static_cast<size_t>(rows) * cols, g.data.begin());
        pos += static_cast<size_t>(rows) * cols;
        out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<uint8_t> save_idx(const std::vector<GrayImage>& images) {
    if (images.empty()) throw std::runtime_error("idx: empty image list");
    uint32_t rows = static_cast<uint32_t>(images[0].height);
    uint32_t cols = static_cast<uint32_t>(images[0].width);
    std::vector<uint8_t> out;
    auto be32 = [&](uint32_t v) {
        out.push_back(uint8_t(v >> 24));
        out.push_back(uint8_t(v >> 16));
        out.push_back(uint8_t(v >> 8));
        out.push_back(uint8_t(v));
    };
    be32(0x00000803u);
    be32(static_cast<uint32_t>(images.size()));
    be32(rows);
    be32(cols);
    for (const auto& g : images) {
        if (g.width != static_cast<int>(cols) || g.height != static_cast<int>(rows))
            throw std::runtime_error("idx: inconsistent dimensions");
        out.insert(out.end(), g.data.begin(), g.data.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// BT.601 color transform. The forward matrix maps full-range RGB to
// studio-swing YCbCr; rows are ordered Y, Cb, Cr.

namespace bt601 {
inline constexpr double fwd[3][3] = {
    {0.257, 0.504, 0.098},     // Y
    {-0.148, -0.291, 0.439},   // Cb
    {0.439, -0.368, -0.071},   // Cr
};
inline constexpr double offset[3] = {16.0, 128.0, 128.0};

// exact 3x3 inverse of fwd
inline const std::array<std::array<double, 3>, 3>& inv() {
    static const std::array<std::array<double, 3>, 3> m = [] {
        const auto& a = fwd;
        double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        std::array<std::array<double, 3>, 3> r{};
        r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
        r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
        r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
        r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
        r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
        r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
        r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
        r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
        r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
        return r;
    }();
    return m;
}
}  // namespace bt601

struct YcbcrPlanes {
    Plane y, cb, cr;
};

inline YcbcrPlanes rgb_to_ycbcr(const RgbImage& img) {
    YcbcrPlanes out{Plane(img.width, img.height), Plane(img.width, img.height), Plane(img.width, img.height)};
    const size_t n = static_cast<size_t>(img.width) * img.height;
    for (size_t i = 0; i < n; ++i) {
        double r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
        out.y.data[i] = bt601::fwd[0][0] * r + bt601::fwd[0][1] * g + bt601::fwd[0][2] * b + bt601::offset[0];
        out.cb.data[i] = bt601::fwd[1][0] * r + bt601::fwd[1][1] * g + bt601::fwd[1][2] * b + bt601::offset[1];
        out.cr.data[i] = bt601::fwd[2][0] * r + bt601::fwd[2][1] * g + bt601::fwd[2][2] * b + bt601::offset[2];
    }
    return out;
}

inline uint8_t round_clamp_u8(double v) {
    long r = std::lround(v);  // half away from zero
    return static_cast<uint8_t>(std::clamp(r, 0L, 255L));
}

inline RgbImage ycbcr_to_rgb(const Plane& y, const Plane& cb, const Plane& cr) {
    if (!y.same_dims(cb) || !y.same_dims(cr)) throw std::runtime_error("ycbcr_to_rgb: dimension mismatch");
    const auto& m = bt601::inv();
    RgbImage out(y.width, y.height);
    const size_t n = y.data.size();
    for (size_t i = 0; i < n; ++i) {
        double e0 = y.data[i] - bt601::offset[0];
        double e1 = cb.data[i] - bt601::offset[1];
        double e2 = cr.data[i] - bt601::offset[2];
        out.data[3 * i] = round_clamp_u8(m[0][0] * e0 + m[0][1] * e1 + m[0][2] * e2);
        out.data[3 * i + 1] = round_clamp_u8(m[1][0] * e0 + m[1][1] * e1 + m[1][2] * e2);
        out.data[3 * i + 2] = round_clamp_u8(m[2][0] * e0 + m[2][1] * e1 + m[2][2] * e2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// helpers shared by the link harness

inline Plane gray_to_plane(const GrayImage& g) {
    Plane p(g.width, g.height);
    for (size_t i = 0; i < g.data.size(); ++i) p.data[i] = g.data[i];
    return p;
}

inline GrayImage plane_to_gray(const Plane& p) {
    GrayImage g(p.width, p.height);
    for (size_t i = 0; i < p.data.size(); ++i) g.data[i] = round_clamp_u8(p.data[i]);
    return g;
}

// Pads right/bottom by edge replication so both dimensions become multiples of m.
inline RgbImage pad_replicate(const RgbImage& img, int m) {
    int w = (img.width + m - 1) / m * m;
    int h = (img.height + m - 1) / m * m;
    if (w == img.width && h == img.height) return img;
    RgbImage out(w, h);
    for (int y = 0; y < h; ++y) {
        int sy = std::min(y, img.height - 1);
        for (int x = 0; x < w; ++x) {
            int sx = std::min(x, img.width - 1);
            const uint8_t* s = img.px(sx, sy);
            uint8_t* d = out.px(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
        }
    }
    return out;
}

inline RgbImage crop(const RgbImage& img, int w, int h) {
    if (w > img.width || h > img.height) throw std::runtime_error("crop: target larger than source");
    if (w == img.width && h == img.height) return img;
    RgbImage out(w, h);
    for (int y = 0; y < h; ++y)
        std::copy_n(img.px(0, y), static_cast<size_t>(w) * 3, out.px(0, y));
    return out;
}

}  // namespace hbsc
