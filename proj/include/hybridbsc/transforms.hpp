// Orthonormal block transforms: one-level 2-D Haar DWT, 2-D DCT-II (4x4 and
// 8x8), and a 4x4 SVD built on a Jacobi eigensolver of B^T B.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "image.hpp"

namespace hbsc {

struct Subbands {
    Plane ll, lh, hl, hh;
};

// ---------------------------------------------------------------------------
// One-level 2-D Haar DWT, orthonormal scaling. For a 2x2 cell [a b; c d]:
//   ll = (a+b+c+d)/2   lh = (a-b+c-d)/2
//   hl = (a+b-c-d)/2   hh = (a-b-c+d)/2
// so a constant image of value v yields an LL subband of value 2v.

inline Subbands dwt2_haar(const Plane& src) {
    if (src.width % 2 != 0 || src.height % 2 != 0) throw std::runtime_error("dwt2_haar: odd dimensions");
    int w = src.width / 2, h = src.height / 2;
    Subbands s{Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h)};
    for (int y = 0; y < h; ++y) {
        const double* r0 = src.row(2 * y);
        const double* r1 = src.row(2 * y + 1);
        for (int x = 0; x < w; ++x) {
            double a = r0[2 * x], b = r0[2 * x + 1];
            double c = r1[2 * x], d = r1[2 * x + 1];
            s.ll.at(x, y) = 0.5 * (a + b + c + d);
            s.lh.at(x, y) = 0.5 * (a - b + c - d);
            s.hl.at(x, y) = 0.5 * (a + b - c - d);
            s.hh.at(x, y) = 0.5 * (a - b - c + d);
        }
    }
    return s;
}

inline Plane idwt2_haar(const Subbands& s) {
    if (!s.ll.same_dims(s.lh) || !s.ll.same_dims(s.hl) || !s.ll.same_dims(s.hh))
        throw std::runtime_error("idwt2_haar: subband dimension mismatch");
    Plane out(s.ll.width * 2, s.ll.height * 2);
    for (int y = 0; y < s.ll.height; ++y) {
        double* r0 = out.row(2 * y);
        double* r1 = out.row(2 * y + 1);
        for (int x = 0; x < s.ll.width; ++x) {
            double ll = s.ll.at(x, y), lh = s.lh.at(x, y);
            double hl = s.hl.at(x, y), hh = s.hh.at(x, y);
            r0[2 * x] = 0.5 * (ll + lh + hl + hh);
            r0[2 * x + 1] = 0.5 * (ll - lh + hl - hh);
            r1[2 * x] = 0.5 * (ll + lh - hl - hh);
            r1[2 * x + 1] = 0.5 * (ll - lh - hl + hh);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2-D orthonormal DCT-II on NxN blocks, N in {4, 8}. X = C x C^T with
// C[0][j] = sqrt(1/N), C[u][j] = sqrt(2/N) cos((2j+1) u pi / (2N)).

namespace detail {

template <int N>
inline const std::array<double, N * N>& dct_basis() {
    static const std::array<double, N * N> c = [] {
        std::array<double, N * N> m{};
        const double pi = std::acos(-1.0);
        for (int u = 0; u < N; ++u) {
            double a = (u == 0) ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N);
            for (int j = 0; j < N; ++j)
                m[u * N + j] = a * std::cos((2 * j + 1) * u * pi / (2.0 * N));
        }
        return m;
    }();
    return c;
}

template <int N>
inline void dct2_fixed(const double* in, double* out, bool inverse) {
    const auto& c = dct_basis<N>();
    double tmp[N * N];
    // rows: tmp = in * C^T (forward) or in * C (inverse)
    for (int y = 0; y < N; ++y)
        for (int u = 0; u < N; ++u) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += in[y * N + j] * (inverse ? c[j * N + u] : c[u * N + j]);
            tmp[y * N + u] = acc;
        }
    // columns
    for (int u = 0; u < N; ++u)
        for (int x = 0; x < N; ++x) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += (inverse ? c[j * N + u] : c[u * N + j]) * tmp[j * N + x];
            out[u * N + x] = acc;
        }
}

}  // namespace detail

inline void dct2_block(const double* in, double* out, int n) {
    if (n == 4)
        detail::dct2_fixed<4>(in, out, false);
    else if (n == 8)
        detail::dct2_fixed<8>(in, out, false);
    else
        throw std::runtime_error("dct2_block: unsupported size");
}

inline void idct2_block(const double* in, double* out, int n) {
    if (n == 4)
        detail::dct2_fixed<4>(in, out, true);
    else if (n == 8)
        detail::dct2_fixed<8>(in, out, true);
    else
        throw std::runtime_error("idct2_block: unsupported size");
}

// ---------------------------------------------------------------------------
// 4x4 SVD, B = U diag(z) V^T with z[0] >= z[1] >= z[2] >= z[3] >= 0.
// Eigendecomposition of B^T B by cyclic Jacobi rotations; left vectors are
// recovered as B v / |B v| and missing columns (rank-deficient B) are
// completed to an orthonormal set. Sign convention: the first component of
// each right-singular vector with magnitude > 1e-12 is non-negative.

struct BlockSvd {
    std::array<double, 16> u{};  // row-major 4x4
    std::array<double, 4> z{};
    std::array<double, 16> v{};  // row-major 4x4, columns are right vectors
};

namespace detail {

inline void jacobi_sym4(std::array<double, 16>& a, std::array<double, 16>& v) {
    // a: symmetric input, overwritten with near-diagonal form; v accumulates rotations.
    v = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    double scale = 0.0;
    for (int i = 0; i < 16; ++i) scale += a[i] * a[i];
    scale = std::sqrt(scale);
    if (scale == 0.0) return;
    const double tol = 1e-12 * scale;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += a[p * 4 + q] * a[p * 4 + q];
        if (std::sqrt(2.0 * off) < tol) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                double apq = a[p * 4 + q];
                if (std::fabs(apq) <= tol * 1e-4) continue;
                double theta = (a[q * 4 + q] - a[p * 4 + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < 4; ++k) {  // rotate rows/cols p,q of a
                    double akp = a[k * 4 + p], akq = a[k * 4 + q];
                    a[k * 4 + p] = c * akp - s * akq;
                    a[k * 4 + q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    double apk = a[p * 4 + k], aqk = a[q * 4 + k];
                    a[p * 4 + k] = c * apk - s * aqk;
                    a[q * 4 + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 4; ++k) {
                    double vkp = v[k * 4 + p], vkq = v[k * 4 + q];
                    v[k * 4 + p] = c * vkp - s * vkq;
                    v[k * 4 + q] = s * vkp + c * vkq;
                }
            }
    }
}

}  // namespace detail

inline BlockSvd svd_4x4(const double* b) {
    std::array<double, 16> ata{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += b[k * 4 + i] * b[k * 4 + j];
            ata[i * 4 + j] = acc;
        }
    std::array<double, 16> vecs{};
    detail::jacobi_sym4(ata, vecs);

    // eigenvalues on the diagonal; sort descending
    std::array<int, 4> order{0, 1, 2, 3};
    std::array<double, 4> lam{ata[0], ata[5], ata[10], ata[15]};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (lam[order[j]] > lam[order[i]]) std::swap(order[i], order[j]);

    BlockSvd r;
    double zmax = 0.0;
    for (int c = 0; c < 4; ++c) {
        int src = order[c];
        std::array<double, 4> vc{vecs[src], vecs[4 + src], vecs[8 + src], vecs[12 + src]};
        std::array<double, 4> uc{};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) uc[i] += b[i * 4 + k] * vc[k];
        double sigma = std::sqrt(uc[0] * uc[0] + uc[1] * uc[1] + uc[2] * uc[2] + uc[3] * uc[3]);
        if (c == 0) zmax = sigma;
        if (sigma > 1e-14 * std::max(zmax, 1.0)) {
            for (auto& x : uc) x /= sigma;
        } else {
            sigma = 0.0;
            uc = {0, 0, 0, 0};  // completed below
        }
        // sign convention on the right vector
        for (int i = 0; i < 4; ++i) {
            if (std::fabs(vc[i]) > 1e-12) {
                if (vc[i] < 0)
                    for (int k = 0; k < 4; ++k) {
                        vc[k] = -vc[k];
                        uc[k] = -uc[k];
                    }
                break;
            }
        }
        r.z[c] = sigma;
        for (int i = 0; i < 4; ++i) {
            r.v[i * 4 + c] = vc[i];
            r.u[i * 4 + c] = uc[i];
        }
    }

    // complete U to an orthonormal basis where sigma vanished
    for (int c = 0; c < 4; ++c) {
        if (r.z[c] > 0.0) continue;
        for (int cand = 0; cand < 8; ++cand) {
            std::array<double, 4> e{};
            if (cand < 4)
                e[cand] = 1.0;
            else
                for (int i = 0; i < 4; ++i) e[i] = (i == cand - 4) ? 1.0 : 0.37;  // fallback direction
            for (int o = 0; o < 4; ++o) {  // Gram-Schmidt against existing columns
                if (o == c || (r.z[o] == 0.0 && o > c)) continue;
                double dot = 0.0;
                for (int i = 0; i < 4; ++i) dot += e[i] * r.u[i * 4 + o];
                for (int i = 0; i < 4; ++i) e[i] -= dot * r.u[i * 4 + o];
            }
            double n = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[3] * e[3]);
            if (n > 1e-6) {
                for (int i = 0; i < 4; ++i) r.u[i * 4 + c] = e[i] / n;
                break;
            }
        }
    }
    return r;
}

inline void reconstruct_svd(const BlockSvd& s, double* out) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += s.u[i * 4 + k] * s.z[k] * s.v[j * 4 + k];
            out[i * 4 + j] = acc;
        }
}

}  // namespace hbsc
