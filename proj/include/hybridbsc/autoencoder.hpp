// Convolutional autoencoder for 28x28 semantic images: four 3x3 conv layers
// per side (1-32-16-16-1 channels), ReLU throughout, the encoder output
// clamped to [0,1] and the decoder output squashed by a sigmoid. Training is
// plain Adam on MSE with a fixed, seeded batch schedule so runs are
// bit-reproducible. The scalar type is a template parameter: float is used
// for training throughput, double for gradient verification.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "embed.hpp"
#include "image.hpp"
#include "rng.hpp"

namespace hbsc {

enum class Act { relu, relu_clamp01, sigmoid };

template <class T>
struct Conv3x3 {
    int cin = 0, cout = 0;
    std::vector<T> w;  // [cout][cin][3][3]
    std::vector<T> b;  // [cout]

    void resize(int ci, int co) {
        cin = ci;
        cout = co;
        w.assign(static_cast<size_t>(ci) * co * 9, T(0));
        b.assign(static_cast<size_t>(co), T(0));
    }
};

template <class T>
struct AutoEncoder {
    std::array<Conv3x3<T>, 4> enc;
    std::array<Conv3x3<T>, 4> dec;

    static constexpr std::array<int, 5> channels{1, 32, 16, 16, 1};
    static constexpr std::array<Act, 4> enc_act{Act::relu, Act::relu, Act::relu, Act::relu_clamp01};
    static constexpr std::array<Act, 4> dec_act{Act::relu, Act::relu, Act::relu, Act::sigmoid};

    size_t param_count() const {
        size_t n = 0;
        for (const auto& l : enc) n += l.w.size() + l.b.size();
        for (const auto& l : dec) n += l.w.size() + l.b.size();
        return n;
    }
};

using AutoEncoderF = AutoEncoder<float>;
using AutoEncoderD = AutoEncoder<double>;

template <class T>
inline AutoEncoder<T> init_model(uint64_t seed) {
    AutoEncoder<T> m;
    Rng rng(derive_seed(seed, 0xA11CEull));
    auto init_layer = [&](Conv3x3<T>& l, int ci, int co) {
        l.resize(ci, co);
        double lim = std::sqrt(6.0 / (ci * 9.0));  // He-style fan-in scaling
        for (auto& x : l.w) x = static_cast<T>(rng.uniform(-lim, lim));
        for (auto& x : l.b) x = static_cast<T>(0.01);
    };
    for (int i = 0; i < 4; ++i) init_layer(m.enc[i], AutoEncoder<T>::channels[i], AutoEncoder<T>::channels[i + 1]);
    for (int i = 0; i < 4; ++i) init_layer(m.dec[i], AutoEncoder<T>::channels[i], AutoEncoder<T>::channels[i + 1]);
    // Output-layer bias starts at the data prior: digit images are mostly
    // near-black, so the sigmoid should open around a low mean intensity
    // instead of 0.5. Cuts many epochs of background fitting.
    for (auto& x : m.dec[3].b) x = static_cast<T>(-2.0);
    return m;
}

// ---------------------------------------------------------------------------
// conv kernels (stride 1, zero padding 1, kernel 3). Channel-major layout.
// The inner loops are written so the x sweep is contiguous and reduction-free;
// weight gradients use fixed-width lane accumulation so the summation order is
// part of the definition, not left to the optimizer.

namespace detail {

template <class T>
inline void conv3x3_forward(const T* in, int cin, T* out, int cout, int h, int w,
                            const T* wt, const T* bias, const T* zrow) {
    const size_t hw = static_cast<size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        T* oc = out + co * hw;
        for (size_t i = 0; i < hw; ++i) oc[i] = bias[co];
        for (int ci = 0; ci < cin; ++ci) {
            const T* icp = in + ci * hw;
            const T* wp = wt + (static_cast<size_t>(co) * cin + ci) * 9;
            const T w00 = wp[0], w01 = wp[1], w02 = wp[2];
            const T w10 = wp[3], w11 = wp[4], w12 = wp[5];
            const T w20 = wp[6], w21 = wp[7], w22 = wp[8];
            for (int y = 0; y < h; ++y) {
                const T* r0 = y > 0 ? icp + static_cast<size_t>(y - 1) * w : zrow;
                const T* r1 = icp + static_cast<size_t>(y) * w;
                const T* r2 = y < h - 1 ? icp + static_cast<size_t>(y + 1) * w : zrow;
                T* orow = oc + static_cast<size_t>(y) * w;
                orow[0] += w01 * r0[0] + w02 * r0[1] + w11 * r1[0] + w12 * r1[1] + w21 * r2[0] + w22 * r2[1];
                for (int x = 1; x < w - 1; ++x)
                    orow[x] += w00 * r0[x - 1] + w01 * r0[x] + w02 * r0[x + 1] +
                               w10 * r1[x - 1] + w11 * r1[x] + w12 * r1[x + 1] +
                               w20 * r2[x - 1] + w21 * r2[x] + w22 * r2[x + 1];
                const int x = w - 1;
                orow[x] += w00 * r0[x - 1] + w01 * r0[x] + w10 * r1[x - 1] + w11 * r1[x] +
                           w20 * r2[x - 1] + w21 * r2[x];
            }
        }
    }
}

// dL/d(input) from dL/d(pre-activation): correlation with the flipped kernel
template <class T>
inline void conv3x3_backward_input(const T* dz, int cout, T* din, int cin, int h, int w,
                                   const T* wt, const T* zrow) {
    const size_t hw = static_cast<size_t>(h) * w;
    for (int ci = 0; ci < cin; ++ci) {
        T* dc = din + ci * hw;
        for (size_t i = 0; i < hw; ++i) dc[i] = T(0);
        for (int co = 0; co < cout; ++co) {
            const T* zc = dz + co * hw;
            const T* wp = wt + (static_cast<size_t>(co) * cin + ci) * 9;
            const T w00 = wp[8], w01 = wp[7], w02 = wp[6];  // flipped taps
            const T w10 = wp[5], w11 = wp[4], w12 = wp[3];
            const T w20 = wp[2], w21 = wp[1], w22 = wp[0];
            for (int y = 0; y < h; ++y) {
                const T* r0 = y > 0 ? zc + static_cast<size_t>(y - 1) * w : zrow;
                const T* r1 = zc + static_cast<size_t>(y) * w;
                const T* r2 = y < h - 1 ? zc + static_cast<size_t>(y + 1) * w : zrow;
                T* orow = dc + static_cast<size_t>(y) * w;
                orow[0] += w01 * r0[0] + w02 * r0[1] + w11 * r1[0] + w12 * r1[1] + w21 * r2[0] + w22 * r2[1];
                for (int x = 1; x < w - 1; ++x)
                    orow[x] += w00 * r0[x - 1] + w01 * r0[x] + w02 * r0[x + 1] +
                               w10 * r1[x - 1] + w11 * r1[x] + w12 * r1[x + 1] +
                               w20 * r2[x - 1] + w21 * r2[x] + w22 * r2[x + 1];
                const int x = w - 1;
                orow[x] += w00 * r0[x - 1] + w01 * r0[x] + w10 * r1[x - 1] + w11 * r1[x] +
                           w20 * r2[x - 1] + w21 * r2[x];
            }
        }
    }
}

template <class T>
inline T dot_lanes(const T* a, const T* b, int n) {
    T s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        s4 += a[i + 4] * b[i + 4];
        s5 += a[i + 5] * b[i + 5];
        s6 += a[i + 6] * b[i + 6];
        s7 += a[i + 7] * b[i + 7];
    }
    T tail = 0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7)) + tail;
}

template <class T>
inline void conv3x3_backward_weights(const T* a_prev, int cin, const T* dz, int cout, int h, int w,
                                     T* dw, T* db) {
    const size_t hw = static_cast<size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        const T* zc = dz + co * hw;
        T acc = 0;
        for (size_t i = 0; i < hw; ++i) acc += zc[i];
        db[co] += acc;
        for (int ci = 0; ci < cin; ++ci) {
            const T* ac = a_prev + ci * hw;
            T* dwp = dw + (static_cast<size_t>(co) * cin + ci) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                const int y0 = ky == 0 ? 1 : 0;
                const int y1 = ky == 2 ? h - 1 : h;
                for (int kx = 0; kx < 3; ++kx) {
                    // zero padding: out-of-range columns contribute nothing,
                    // so each (ky,kx) tap reduces to shifted contiguous dots
                    const int x0 = kx == 0 ? 1 : 0;
                    const int x1 = kx == 2 ? w - 1 : w;
                    T acc9 = 0;
                    for (int y = y0; y < y1; ++y)
                        acc9 += dot_lanes(zc + static_cast<size_t>(y) * w + x0,
                                          ac + static_cast<size_t>(y + ky - 1) * w + x0 + (kx - 1), x1 - x0);
                    dwp[ky * 3 + kx] += acc9;
                }
            }
        }
    }
}

template <class T>
inline void apply_act(T* a, size_t n, Act act) {
    switch (act) {
        case Act::relu:
            for (size_t i = 0; i < n; ++i) a[i] = a[i] > T(0) ? a[i] : T(0);
            break;
        case Act::relu_clamp01:
            for (size_t i = 0; i < n; ++i) a[i] = a[i] < T(0) ? T(0) : (a[i] > T(1) ? T(1) : a[i]);
            break;
        case Act::sigmoid:
            for (size_t i = 0; i < n; ++i) a[i] = T(1) / (T(1) + std::exp(-a[i]));
            break;
    }
}

// derivative w.r.t. pre-activation, recoverable from the post-activation value
template <class T>
inline void act_backward(const T* a, T* g, size_t n, Act act) {
    switch (act) {
        case Act::relu:
            for (size_t i = 0; i < n; ++i)
                if (!(a[i] > T(0))) g[i] = T(0);
            break;
        case Act::relu_clamp01:
            for (size_t i = 0; i < n; ++i)
                if (!(a[i] > T(0)) || !(a[i] < T(1))) g[i] = T(0);
            break;
        case Act::sigmoid:
            for (size_t i = 0; i < n; ++i) g[i] *= a[i] * (T(1) - a[i]);
            break;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// forward passes

// Per-sample activation storage: acts[0] is the input plane, acts[1..4] the
// encoder outputs, acts[5..8] the decoder outputs.
template <class T>
struct Workspace {
    int h = 0, w = 0;
    std::array<std::vector<T>, 9> acts;
    std::array<std::vector<T>, 9> grads;  // dL/d(post-activation), same shapes
    std::vector<T> zrow;

    void resize(int hh, int ww) {
        h = hh;
        w = ww;
        const auto& ch = AutoEncoder<T>::channels;
        for (int i = 0; i < 9; ++i) {
            int c = i == 0 ? ch[0] : ch[(i - 1) % 4 + 1];
            acts[i].assign(static_cast<size_t>(c) * h * w, T(0));
            grads[i].assign(static_cast<size_t>(c) * h * w, T(0));
        }
        zrow.assign(static_cast<size_t>(w), T(0));
    }
};

template <class T>
inline void forward(const AutoEncoder<T>& m, Workspace<T>& ws) {
    const auto& ch = AutoEncoder<T>::channels;
    for (int l = 0; l < 4; ++l) {
        detail::conv3x3_forward(ws.acts[l].data(), ch[l], ws.acts[l + 1].data(), ch[l + 1],
                                ws.h, ws.w, m.enc[l].w.data(), m.enc[l].b.data(), ws.zrow.data());
        detail::apply_act(ws.acts[l + 1].data(), ws.acts[l + 1].size(), AutoEncoder<T>::enc_act[l]);
    }
    for (int l = 0; l < 4; ++l) {
        detail::conv3x3_forward(ws.acts[4 + l].data(), ch[l], ws.acts[5 + l].data(), ch[l + 1],
                                ws.h, ws.w, m.dec[l].w.data(), m.dec[l].b.data(), ws.zrow.data());
        detail::apply_act(ws.acts[5 + l].data(), ws.acts[5 + l].size(), AutoEncoder<T>::dec_act[l]);
    }
}

template <class T>
struct ModelGrads {
    std::array<Conv3x3<T>, 4> enc, dec;

    void match(const AutoEncoder<T>& m) {
        for (int i = 0; i < 4; ++i) {
            enc[i].resize(m.enc[i].cin, m.enc[i].cout);
            dec[i].resize(m.dec[i].cin, m.dec[i].cout);
        }
    }
    void zero() {
        for (auto& l : enc) {
            std::fill(l.w.begin(), l.w.end(), T(0));
            std::fill(l.b.begin(), l.b.end(), T(0));
        }
        for (auto& l : dec) {
            std::fill(l.w.begin(), l.w.end(), T(0));
            std::fill(l.b.begin(), l.b.end(), T(0));
        }
    }
};

// Accumulates gradients for one sample; ws.grads[8] must hold dL/d(output).
template <class T>
inline void backward(const AutoEncoder<T>& m, Workspace<T>& ws, ModelGrads<T>& g) {
    const auto& ch = AutoEncoder<T>::channels;
    for (int l = 3; l >= 0; --l) {
        detail::act_backward(ws.acts[5 + l].data(), ws.grads[5 + l].data(), ws.grads[5 + l].size(),
                             AutoEncoder<T>::dec_act[l]);
        detail::conv3x3_backward_weights(ws.acts[4 + l].data(), ch[l], ws.grads[5 + l].data(), ch[l + 1],
                                         ws.h, ws.w, g.dec[l].w.data(), g.dec[l].b.data());
        detail::conv3x3_backward_input(ws.grads[5 + l].data(), ch[l + 1], ws.grads[4 + l].data(), ch[l],
                                       ws.h, ws.w, m.dec[l].w.data(), ws.zrow.data());
    }
    for (int l = 3; l >= 0; --l) {
        detail::act_backward(ws.acts[l + 1].data(), ws.grads[l + 1].data(), ws.grads[l + 1].size(),
                             AutoEncoder<T>::enc_act[l]);
        detail::conv3x3_backward_weights(ws.acts[l].data(), ch[l], ws.grads[l + 1].data(), ch[l + 1],
                                         ws.h, ws.w, g.enc[l].w.data(), g.enc[l].b.data());
        if (l > 0)
            detail::conv3x3_backward_input(ws.grads[l + 1].data(), ch[l + 1], ws.grads[l].data(), ch[l],
                                           ws.h, ws.w, m.enc[l].w.data(), ws.zrow.data());
    }
}

// ---------------------------------------------------------------------------
// public inference API

template <class T>
inline FeatureTensor encode_semantic(const GrayImage& img, const AutoEncoder<T>& m) {
    Workspace<T> ws;
    ws.resize(img.height, img.width);
    for (size_t i = 0; i < img.data.size(); ++i) ws.acts[0][i] = static_cast<T>(img.data[i] / 255.0);
    const auto& ch = AutoEncoder<T>::channels;
    for (int l = 0; l < 4; ++l) {
        detail::conv3x3_forward(ws.acts[l].data(), ch[l == 0 ? 0 : l], ws.acts[l + 1].data(), ch[l + 1],
                                ws.h, ws.w, m.enc[l].w.data(), m.enc[l].b.data(), ws.zrow.data());
        detail::apply_act(ws.acts[l + 1].data(), ws.acts[l + 1].size(), AutoEncoder<T>::enc_act[l]);
    }
    FeatureTensor f(img.height, img.width, 1);
    for (size_t i = 0; i < f.v.size(); ++i) f.v[i] = static_cast<double>(ws.acts[4][i]);
    return f;
}

// Returns the reconstructed plane with values in (0, 1).
template <class T>
inline Plane decode_semantic(const FeatureTensor& f, const AutoEncoder<T>& m) {
    if (f.channels != 1) throw std::runtime_error("decode_semantic: expected a single-channel feature map");
    Workspace<T> ws;
    ws.resize(f.height, f.width);
    for (size_t i = 0; i < f.v.size(); ++i) ws.acts[4][i] = static_cast<T>(f.v[i]);
    const auto& ch = AutoEncoder<T>::channels;
    for (int l = 0; l < 4; ++l) {
        detail::conv3x3_forward(ws.acts[4 + l].data(), ch[l], ws.acts[5 + l].data(), ch[l + 1],
                                ws.h, ws.w, m.dec[l].w.data(), m.dec[l].b.data(), ws.zrow.data());
        detail::apply_act(ws.acts[5 + l].data(), ws.acts[5 + l].size(), AutoEncoder<T>::dec_act[l]);
    }
    Plane out(f.width, f.height);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = static_cast<double>(ws.acts[8][i]);
    return out;
}

inline GrayImage plane01_to_gray(const Plane& p) {
    GrayImage g(p.width, p.height);
    for (size_t i = 0; i < p.data.size(); ++i) g.data[i] = round_clamp_u8(p.data[i] * 255.0);
    return g;
}

// ---------------------------------------------------------------------------
// training

struct TrainConfig {
    int epochs = 20;
    int batch_size = 256;
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    uint64_t seed = 1;
};

template <class T>
struct TrainResult {
    AutoEncoder<T> model;
    std::vector<double> epoch_loss;
};

namespace detail {

template <class T>
struct AdamState {
    ModelGrads<T> m, v;
    long t = 0;
};

template <class T>
inline void adam_update(std::vector<T>& w, const std::vector<T>& g, std::vector<T>& m, std::vector<T>& v,
                        const TrainConfig& cfg, double bc1, double bc2) {
    for (size_t i = 0; i < w.size(); ++i) {
        double gi = static_cast<double>(g[i]);
        double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * gi;
        double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * gi * gi;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        w[i] -= static_cast<T>(cfg.lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg.eps));
    }
}

}  // namespace detail

template <class T>
inline TrainResult<T> train_autoencoder(const std::vector<GrayImage>& dataset, const TrainConfig& cfg) {
    if (dataset.empty()) throw std::runtime_error("train_autoencoder: empty dataset");
    const int h = dataset[0].height, w = dataset[0].width;
    for (const auto& d : dataset)
        if (d.height != h || d.width != w) throw std::runtime_error("train_autoencoder: inconsistent image sizes");

    TrainResult<T> res;
    res.model = init_model<T>(cfg.seed);
    ModelGrads<T> grads;
    grads.match(res.model);
    detail::AdamState<T> adam;
    adam.m.match(res.model);
    adam.v.match(res.model);
    adam.m.zero();
    adam.v.zero();

    Workspace<T> ws;
    ws.resize(h, w);
    const size_t hw = static_cast<size_t>(h) * w;

    std::vector<int> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng shuffle_rng(derive_seed(cfg.seed, 0x5C0FFull));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        fisher_yates(order, shuffle_rng);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t bn = std::min(order.size() - start, static_cast<size_t>(cfg.batch_size));
            grads.zero();
            double batch_loss = 0.0;
            for (size_t k = 0; k < bn; ++k) {
                const auto& img = dataset[order[start + k]];
                for (size_t i = 0; i < hw; ++i) ws.acts[0][i] = static_cast<T>(img.data[i] / 255.0);
                forward(res.model, ws);
                const T scale = static_cast<T>(2.0 / (double(bn) * double(hw)));
                double sample_loss = 0.0;
                for (size_t i = 0; i < hw; ++i) {
                    double err = static_cast<double>(ws.acts[8][i]) - img.data[i] / 255.0;
                    sample_loss += err * err;
                    ws.grads[8][i] = static_cast<T>(err) * scale;
                }
                batch_loss += sample_loss / double(hw);
                backward(res.model, ws, grads);
            }
            ++adam.t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, adam.t);
            const double bc2 = 1.0 - std::pow(cfg.beta2, adam.t);
            for (int l = 0; l < 4; ++l) {
                detail::adam_update(res.model.enc[l].w, grads.enc[l].w, adam.m.enc[l].w, adam.v.enc[l].w, cfg, bc1, bc2);
                detail::adam_update(res.model.enc[l].b, grads.enc[l].b, adam.m.enc[l].b, adam.v.enc[l].b, cfg, bc1, bc2);
                detail::adam_update(res.model.dec[l].w, grads.dec[l].w, adam.m.dec[l].w, adam.v.dec[l].w, cfg, bc1, bc2);
                detail::adam_update(res.model.dec[l].b, grads.dec[l].b, adam.m.dec[l].b, adam.v.dec[l].b, cfg, bc1, bc2);
            }
            epoch_loss += batch_loss;
        }
        res.epoch_loss.push_back(epoch_loss / double(order.size()));
    }
    return res;
}

// ---------------------------------------------------------------------------
// gradient verification: analytic backprop against central finite differences
// on a small random batch, probing a pseudo-random subset of parameters. The
// loss surface is piecewise smooth (ReLU/clamp kinks), so a central
// difference is trusted only when the activation region pattern — which side
// of each kink every pre-activation lies on — is identical at the probe
// point and both displaced points. Probes whose step crosses a kink are
// skipped and another parameter is drawn.

inline double grad_check(uint64_t seed, int probes = 200) {
    const int h = 12, w = 12;
    AutoEncoderD m = init_model<double>(derive_seed(seed, 0));
    Rng rng(derive_seed(seed, 0xDA7Aull));
    std::vector<GrayImage> batch;
    for (int s = 0; s < 2; ++s) {
        GrayImage g(w, h);
        for (auto& px : g.data) px = static_cast<uint8_t>(13 + rng.bounded(230));
        batch.push_back(std::move(g));
    }

    Workspace<double> ws;
    ws.resize(h, w);
    const size_t hw = static_cast<size_t>(h) * w;

    // forward pass that also records the kink-side pattern of every
    // pre-activation (z > 0 for ReLU, plus z > 1 for the clamp)
    auto eval = [&](const GrayImage& img, std::vector<uint8_t>& pattern) {
        for (size_t i = 0; i < hw; ++i) ws.acts[0][i] = img.data[i] / 255.0;
        const auto& ch = AutoEncoderD::channels;
        auto run_net = [&](const std::array<Conv3x3<double>, 4>& net, const std::array<Act, 4>& acts, int base) {
            for (int l = 0; l < 4; ++l) {
                auto& dst = ws.acts[base + l + 1];
                detail::conv3x3_forward(ws.acts[base + l].data(), ch[l], dst.data(), ch[l + 1],
                                        h, w, net[l].w.data(), net[l].b.data(), ws.zrow.data());
                for (double z : dst) {
                    if (acts[l] == Act::relu || acts[l] == Act::relu_clamp01)
                        pattern.push_back(z > 0.0 ? 1 : 0);
                    if (acts[l] == Act::relu_clamp01) pattern.push_back(z > 1.0 ? 1 : 0);
                }
                detail::apply_act(dst.data(), dst.size(), acts[l]);
            }
        };
        run_net(m.enc, AutoEncoderD::enc_act, 0);
        run_net(m.dec, AutoEncoderD::dec_act, 4);
        double loss = 0.0;
        for (size_t i = 0; i < hw; ++i) {
            double err = ws.acts[8][i] - img.data[i] / 255.0;
            loss += err * err;
        }
        return loss / double(hw);
    };
    auto batch_eval = [&](std::vector<uint8_t>& pattern) {
        pattern.clear();
        double acc = 0.0;
        for (const auto& img : batch) acc += eval(img, pattern);
        return acc / double(batch.size());
    };

    // analytic gradients over the batch
    ModelGrads<double> g;
    g.match(m);
    g.zero();
    for (const auto& img : batch) {
        for (size_t i = 0; i < hw; ++i) ws.acts[0][i] = img.data[i] / 255.0;
        forward(m, ws);
        const double scale = 2.0 / (double(batch.size()) * double(hw));
        for (size_t i = 0; i < hw; ++i)
            ws.grads[8][i] = (ws.acts[8][i] - img.data[i] / 255.0) * scale;
        backward(m, ws, g);
    }

    std::vector<double*> params;
    std::vector<double*> grad_ptrs;
    for (int l = 0; l < 4; ++l) {
        for (size_t i = 0; i < m.enc[l].w.size(); ++i) params.push_back(&m.enc[l].w[i]), grad_ptrs.push_back(&g.enc[l].w[i]);
        for (size_t i = 0; i < m.enc[l].b.size(); ++i) params.push_back(&m.enc[l].b[i]), grad_ptrs.push_back(&g.enc[l].b[i]);
        for (size_t i = 0; i < m.dec[l].w.size(); ++i) params.push_back(&m.dec[l].w[i]), grad_ptrs.push_back(&g.dec[l].w[i]);
        for (size_t i = 0; i < m.dec[l].b.size(); ++i) params.push_back(&m.dec[l].b[i]), grad_ptrs.push_back(&g.dec[l].b[i]);
    }

    std::vector<uint8_t> pat_0, pat_p, pat_m;
    batch_eval(pat_0);

    Rng pick(derive_seed(seed, 0x91CCull));
    const double step = 1e-4;
    double worst = 0.0;
    int accepted = 0;
    long draws = 0;
    while (accepted < probes) {
        if (++draws > 64L * probes) throw std::runtime_error("grad_check: could not find kink-safe probes");
        size_t idx = static_cast<size_t>(pick.bounded(params.size()));
        double saved = *params[idx];
        *params[idx] = saved + step;
        double lp = batch_eval(pat_p);
        *params[idx] = saved - step;
        double lm = batch_eval(pat_m);
        *params[idx] = saved;
        if (pat_p != pat_0 || pat_m != pat_0) continue;  // step crossed an activation kink
        double numeric = (lp - lm) / (2.0 * step);
        double analytic = *grad_ptrs[idx];
        double denom = std::max(std::fabs(numeric) + std::fabs(analytic), 1e-6);
        worst = std::max(worst, std::fabs(numeric - analytic) / denom);
        ++accepted;
    }
    return worst;
}

// ---------------------------------------------------------------------------
// checkpoint format: "HBSC", u32 version, u32 layer count, per layer u32
// cin/cout, then every parameter as IEEE f64 little-endian (encoder layers
// first, weights before biases).

namespace detail {

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 24));
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t u = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(uint8_t(u >> (8 * i)));
}

struct ByteReader {
    const std::vector<uint8_t>& b;
    size_t pos = 0;

    uint32_t u32() {
        if (pos + 4 > b.size()) throw std::runtime_error("checkpoint: truncated");
        uint32_t v = uint32_t(b[pos]) | (uint32_t(b[pos + 1]) << 8) | (uint32_t(b[pos + 2]) << 16) |
                     (uint32_t(b[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    double f64() {
        if (pos + 8 > b.size()) throw std::runtime_error("checkpoint: truncated");
        uint64_t u = 0;
        for (int i = 0; i < 8; ++i) u |= uint64_t(b[pos + i]) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(u);
    }
};

}  // namespace detail

template <class T>
inline std::vector<uint8_t> serialize_model(const AutoEncoder<T>& m) {
    std::vector<uint8_t> out{'H', 'B', 'S', 'C'};
    detail::put_u32(out, 1);  // version
    detail::put_u32(out, 8);  // layer count
    auto dims = [&](const Conv3x3<T>& l) {
        detail::put_u32(out, static_cast<uint32_t>(l.cin));
        detail::put_u32(out, static_cast<uint32_t>(l.cout));
    };
    for (const auto& l : m.enc) dims(l);
    for (const auto& l : m.dec) dims(l);
    auto body = [&](const Conv3x3<T>& l) {
        for (T v : l.w) detail::put_f64(out, static_cast<double>(v));
        for (T v : l.b) detail::put_f64(out, static_cast<double>(v));
    };
    for (const auto& l : m.enc) body(l);
    for (const auto& l : m.dec) body(l);
    return out;
}

template <class T>
inline AutoEncoder<T> deserialize_model(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 12 || bytes[0] != 'H' || bytes[1] != 'B' || bytes[2] != 'S' || bytes[3] != 'C')
        throw std::runtime_error("checkpoint: bad magic");
    detail::ByteReader r{bytes, 4};
    if (r.u32() != 1) throw std::runtime_error("checkpoint: unsupported version");
    if (r.u32() != 8) throw std::runtime_error("checkpoint: unexpected layer count");
    AutoEncoder<T> m;
    auto load_dims = [&](Conv3x3<T>& l, int exp_cin, int exp_cout) {
        uint32_t ci = r.u32(), co = r.u32();
        if (ci != static_cast<uint32_t>(exp_cin) || co != static_cast<uint32_t>(exp_cout))
            throw std::runtime_error("checkpoint: layer dimension mismatch");
        l.resize(exp_cin, exp_cout);
    };
    const auto& ch = AutoEncoder<T>::channels;
    for (int i = 0; i < 4; ++i) load_dims(m.enc[i], ch[i], ch[i + 1]);
    for (int i = 0; i < 4; ++i) load_dims(m.dec[i], ch[i], ch[i + 1]);
    auto body = [&](Conv3x3<T>& l) {
        for (auto& v : l.w) v = static_cast<T>(r.f64());
        for (auto& v : l.b) v = static_cast<T>(r.f64());
    };
    for (auto& l : m.enc) body(l);
    for (auto& l : m.dec) body(l);
    return m;
}

template <class T>
inline void save_model(const std::string& path, const AutoEncoder<T>& m) {
    write_file(path, serialize_model(m));
}

template <class T>
inline AutoEncoder<T> load_model(const std::string& path) {
    return deserialize_model<T>(read_file(path));
}

}  // namespace hbsc
