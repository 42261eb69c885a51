// Rate-1/2 quasi-cyclic LDPC code (n = 648, k = 324, Z = 27, the Wi-Fi
// prototype matrix) with dual-diagonal encoding and sum-product belief
// propagation. The prototype is a 12x24 grid of circulant shifts; -1 marks
// an all-zero block.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbsc {

namespace detail {

// exp(x) for x in [-40, 40] as pure polynomial arithmetic (relative error
// ~1e-12). The decoder evaluates this once per edge per iteration, and an
// inlineable branch-free body lets the compiler vectorize that loop, which
// an opaque libm call would prevent.
inline double fast_exp(double x) {
    const double y = x * 1.4426950408889634074;  // x * log2(e)
    const double n = std::floor(y + 0.5);
    const double u = (y - n) * 0.6931471805599453094;  // |u| <= 0.347
    double p = 1.0 / 362880.0;
    p = p * u + 1.0 / 40320.0;
    p = p * u + 1.0 / 5040.0;
    p = p * u + 1.0 / 720.0;
    p = p * u + 1.0 / 120.0;
    p = p * u + 1.0 / 24.0;
    p = p * u + 1.0 / 6.0;
    p = p * u + 0.5;
    p = p * u + 1.0;
    p = p * u + 1.0;
    const auto bits = static_cast<uint64_t>(static_cast<int64_t>(n) + 1023) << 52;
    return p * std::bit_cast<double>(bits);
}

// log(x) for normal positive x (relative error ~1e-12), same rationale.
inline double fast_log(double x) {
    const uint64_t bits = std::bit_cast<uint64_t>(x);
    double e = static_cast<double>(static_cast<int64_t>((bits >> 52) & 0x7FF) - 1023);
    double m = std::bit_cast<double>((bits & 0xFFFFFFFFFFFFFull) | (0x3FFull << 52));
    if (m > 1.4142135623730951) {  // keep m in [sqrt(1/2), sqrt(2))
        m *= 0.5;
        e += 1.0;
    }
    const double t = (m - 1.0) / (m + 1.0);  // |t| <= 0.1716
    const double t2 = t * t;
    double s = 1.0 / 13.0;
    s = s * t2 + 1.0 / 11.0;
    s = s * t2 + 1.0 / 9.0;
    s = s * t2 + 1.0 / 7.0;
    s = s * t2 + 1.0 / 5.0;
    s = s * t2 + 1.0 / 3.0;
    s = s * t2 + 1.0;
    return 2.0 * t * s + e * 0.6931471805599453094;
}

}  // namespace detail

struct LdpcCode {
    int z = 0;               // circulant size
    int n = 0;               // codeword bits
    int k = 0;               // info bits
    int rows = 0, cols = 0;  // prototype dimensions
    std::vector<int> proto;  // rows*cols shifts, -1 for zero block
    int max_iterations = 50;

    // bipartite adjacency of the expanded H
    std::vector<std::vector<int>> check_vars;  // per check row: variable indices
};

inline constexpr const char* kWifi648Rate12 = R"( 0 -1 -1 -1  0  0 -1 -1  0 -1 -1  0  1  0 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1
22  0 -1 -1 17 -1  0  0 12 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1 -1
 6 -1  0 -1 10 -1 -1 -1 24 -1  0 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1
 2 -1 -1  0 20 -1 -1 -1 25  0 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1
23 -1 -1 -1  3 -1 -1 -1  0 -1  9 11 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1
24 -1 23  1 17 -1  3 -1 10 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1
25 -1 -1 -1  8 -1 -1 -1  7 18 -1 -1  0 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1
13 24 -1 -1  0 -1  8 -1  6 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1
 7 20 -1 16 22 10 -1 -1 23 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1
11 -1 -1 -1 19 -1 -1 -1 13 -1  3 17 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1
25 -1  8 -1 23 18 -1 14  9 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0
 3 -1 -1 -1 16 -1 -1  2 25  5 -1 -1  1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0
)";

inline LdpcCode ldpc_from_prototype(const std::string& text, int z = 27) {
    LdpcCode code;
    code.z = z;
    std::istringstream is(text);
    std::vector<std::vector<int>> grid;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<int> row;
        int v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) grid.push_back(std::move(row));
        if (!ls.eof() && ls.fail()) throw std::runtime_error("ldpc: malformed prototype line");
    }
    if (grid.empty()) throw std::runtime_error("ldpc: empty prototype");
    code.rows = static_cast<int>(grid.size());
    code.cols = static_cast<int>(grid[0].size());
    for (const auto& row : grid) {
        if (static_cast<int>(row.size()) != code.cols) throw std::runtime_error("ldpc: ragged prototype");
        for (int v : row) {
            if (v < -1 || v >= z) throw std::runtime_error("ldpc: shift out of range");
            code.proto.push_back(v);
        }
    }
    code.n = code.cols * z;
    code.k = (code.cols - code.rows) * z;

    // expand H: block (i, j) with shift t connects check i*z+r to var j*z+((r+t) mod z)
    code.check_vars.assign(static_cast<size_t>(code.rows) * z, {});
    for (int i = 0; i < code.rows; ++i)
        for (int j = 0; j < code.cols; ++j) {
            int t = code.proto[static_cast<size_t>(i) * code.cols + j];
            if (t < 0) continue;
            for (int r = 0; r < z; ++r)
                code.check_vars[static_cast<size_t>(i) * z + r].push_back(j * z + (r + t) % z);
        }
    return code;
}

inline const LdpcCode& ldpc_wifi_648() {
    static const LdpcCode code = ldpc_from_prototype(kWifi648Rate12, 27);
    return code;
}

// ---------------------------------------------------------------------------
// encoding. The parity part of the prototype has the classic structure: one
// column of shifts (the only non-dual-diagonal parity column) plus a
// dual-diagonal tail, so the first parity block is the XOR of all information
// syndromes and the rest follow by forward substitution.

namespace ldpcdetail {

// cyclic left-rotation of a z-bit block stored as bytes: out[r] = in[(r+t) % z]
inline void rotate_acc(std::vector<uint8_t>& acc, const uint8_t* blk, int t, int z) {
    for (int r = 0; r < z; ++r) acc[r] ^= blk[(r + t) % z];
}

}  // namespace ldpcdetail

inline std::vector<uint8_t> ldpc_encode(const std::vector<uint8_t>& info, const LdpcCode& code) {
    if (static_cast<int>(info.size()) != code.k) throw std::runtime_error("ldpc_encode: info length mismatch");
    const int z = code.z, kb = code.cols - code.rows, rb = code.rows;
    std::vector<uint8_t> cw(static_cast<size_t>(code.n), 0);
    std::copy(info.begin(), info.end(), cw.begin());

    // s_i = sum_j P^{a_ij} u_j  for each prototype row i
    std::vector<std::vector<uint8_t>> s(rb, std::vector<uint8_t>(z, 0));
    for (int i = 0; i < rb; ++i)
        for (int j = 0; j < kb; ++j) {
            int t = code.proto[static_cast<size_t>(i) * code.cols + j];
            if (t >= 0) ldpcdetail::rotate_acc(s[i], info.data() + static_cast<size_t>(j) * z, t, z);
        }

    // p0 = sum_i s_i (the special parity column's shifts telescope to identity)
    std::vector<uint8_t> p0(z, 0);
    for (int i = 0; i < rb; ++i)
        for (int r = 0; r < z; ++r) p0[r] ^= s[i][r];
    std::copy(p0.begin(), p0.end(), cw.begin() + static_cast<size_t>(kb) * z);

    // forward substitution down the dual diagonal:
    // row 0:        p1 = s_0 + P^{b_0} p0
    // row i (i>0):  p_{i+1} = s_i + P^{b_i} p0 + p_i
    std::vector<uint8_t> prev(z, 0);
    for (int i = 0; i + 1 < rb; ++i) {
        std::vector<uint8_t> p(z, 0);
        for (int r = 0; r < z; ++r) p[r] = s[i][r] ^ prev[r];
        int b = code.proto[static_cast<size_t>(i) * code.cols + kb];
        if (b >= 0) ldpcdetail::rotate_acc(p, p0.data(), b, z);
        std::copy(p.begin(), p.end(), cw.begin() + static_cast<size_t>(kb + 1 + i) * z);
        prev = std::move(p);
    }
    return cw;
}

inline bool ldpc_syndrome_ok(const std::vector<uint8_t>& codeword, const LdpcCode& code) {
    if (static_cast<int>(codeword.size()) != code.n) throw std::runtime_error("ldpc_syndrome_ok: length mismatch");
    for (const auto& vars : code.check_vars) {
        int parity = 0;
        for (int v : vars) parity ^= codeword[v];
        if (parity) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// sum-product decoding. LLR convention: positive means bit 0 is more likely.

struct LdpcDecodeResult {
    std::vector<uint8_t> info;
    std::vector<uint8_t> codeword;
    bool converged = false;
    int iterations = 0;
};

inline LdpcDecodeResult ldpc_decode(const std::vector<double>& llr, const LdpcCode& code) {
    if (static_cast<int>(llr.size()) != code.n) throw std::runtime_error("ldpc_decode: llr length mismatch");
    const int ncheck = static_cast<int>(code.check_vars.size());

    // flatten edges
    std::vector<int> edge_var, check_off;
    check_off.reserve(ncheck + 1);
    check_off.push_back(0);
    for (const auto& vars : code.check_vars) {
        for (int v : vars) edge_var.push_back(v);
        check_off.push_back(static_cast<int>(edge_var.size()));
    }
    const int nedge = static_cast<int>(edge_var.size());
    std::vector<double> msg_vc(nedge), msg_cv(nedge, 0.0);
    for (int e = 0; e < nedge; ++e) msg_vc[e] = llr[edge_var[e]];

    std::vector<double> posterior(code.n);
    std::vector<uint8_t> hard(code.n);
    // Scratch, per edge: tanh magnitude, sign, leave-one-out product.
    std::vector<double> q(nedge), sg(nedge), r(nedge);
    LdpcDecodeResult res;

    for (int it = 1; it <= code.max_iterations; ++it) {
        // Check update, tanh product rule in sign/magnitude form:
        //   tanh(m/2) = sign(m) * (1 - 2/(e^|m| + 1)),  2*atanh(p) = log((1+p)/(1-p)).
        // Three passes: two flat loops over all edges carry the transcendental
        // work (vectorizable), the middle pass runs the per-check partial
        // product scans.
        for (int e = 0; e < nedge; ++e) {
            const double m = std::clamp(msg_vc[e], -25.0, 25.0);
            q[e] = 1.0 - 2.0 / (detail::fast_exp(std::fabs(m)) + 1.0);
            sg[e] = std::copysign(1.0, m);
        }
        for (int c = 0; c < ncheck; ++c) {
            const int lo = check_off[c], hi = check_off[c + 1];
            double sprod = 1.0;
            double f = 1.0;
            for (int e = lo; e < hi; ++e) {
                sprod *= sg[e];
                r[e] = f;  // product of magnitudes before e
                f *= q[e];
            }
            double b = 1.0;
            for (int e = hi - 1; e >= lo; --e) {
                r[e] = std::min(r[e] * b, 1.0 - 1e-15);  // leave-one-out product
                sg[e] *= sprod;                          // leave-one-out sign
                b *= q[e];
            }
        }
        for (int e = 0; e < nedge; ++e) {
            msg_cv[e] = sg[e] * detail::fast_log((1.0 + r[e]) / (1.0 - r[e]));
        }
        // variable update and posterior
        for (int v = 0; v < code.n; ++v) posterior[v] = llr[v];
        for (int e = 0; e < nedge; ++e) posterior[edge_var[e]] += msg_cv[e];
        for (int e = 0; e < nedge; ++e) msg_vc[e] = posterior[edge_var[e]] - msg_cv[e];

        for (int v = 0; v < code.n; ++v) hard[v] = posterior[v] < 0.0 ? 1 : 0;
        res.iterations = it;
        if (ldpc_syndrome_ok(hard, code)) {
            res.converged = true;
            break;
        }
    }
    res.codeword = hard;
    res.info.assign(hard.begin(), hard.begin() + code.k);
    return res;
}

}  // namespace hbsc
