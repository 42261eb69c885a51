// End-to-end link: semantic features are embedded into a carrier image,
// the hybrid image rides the conventional JPEG + LDPC + QAM chain over a
// simulated channel, and both the bit image and the semantic payload are
// recovered and scored. The transmit side is deterministic given the config
// (no channel randomness), so sweeps prepare it once per grid point and
// reuse it across seeds.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridbsc/autoencoder.hpp"
#include "hybridbsc/channel.hpp"
#include "hybridbsc/embed.hpp"
#include "hybridbsc/image.hpp"
#include "hybridbsc/jpeg.hpp"
#include "hybridbsc/ldpc.hpp"
#include "hybridbsc/metrics.hpp"
#include "hybridbsc/modem.hpp"
#include "hybridbsc/ofdm.hpp"
#include "hybridbsc/rng.hpp"

namespace hbsc {

struct LinkConfig {
    RgbImage carrier;                          // bit-image source
    GrayImage digit;                           // 28x28 semantic source
    const AutoEncoder<float>* model = nullptr; // required when insertion is on
    Scheme scheme = Scheme::qpsk;
    ChannelKind channel = ChannelKind::awgn;
    double snr_db = 20.0;
    EmbedConfig embed{14.0, 4, true};          // midpoint lattice: robust to rounding
    int jpeg_quality = 0;                      // 0 = auto (rate-matched)
    long symbol_budget = -1;                   // -1 = auto, 0 = unconstrained
    bool ofdm = false;
    bool insertion = true;                     // false = plain JPEG-LDPC baseline
    int restart_interval = 8;
    uint64_t seed = 0;
};

struct LinkResult {
    double psnr_bit = 0.0;
    double ssim_bit = 0.0;
    double psnr_sem = std::numeric_limits<double>::quiet_NaN();
    double ssim_sem = std::numeric_limits<double>::quiet_NaN();
    double payload_ber = std::numeric_limits<double>::quiet_NaN();
    int jpeg_quality_used = 0;
    std::string frame_status = "ok";  // ok | partial | frame-error
    double ldpc_iterations_mean = 0.0;
    int ldpc_blocks_failed = 0;
    int ldpc_blocks_total = 0;
};

inline constexpr int kLdpcInfoBits = 324;
inline constexpr int kLdpcCodedBits = 648;

// Transmission symbols consumed by a byte stream: bits are zero-padded to
// whole LDPC blocks, coded at rate 1/2, then mapped bits_per_symbol at a time
// (648 is divisible by 2, 4 and 6, so the mapping never pads).
inline long symbols_for_stream(size_t stream_bytes, const Modulation& m) {
    const long bits = static_cast<long>(stream_bytes) * 8;
    const long blocks = (bits + kLdpcInfoBits - 1) / kLdpcInfoBits;
    return blocks * kLdpcCodedBits / m.bits_per_symbol;
}

// Largest JPEG quality whose coded stream fits the symbol budget. Binary
// search assuming size grows with quality, then a downward/upward fix-up so
// the postcondition holds even where stream size is locally non-monotone:
// fits(q) and (q == 100 or not fits(q+1)).
inline int rate_match(long symbol_budget, const Modulation& m, const RgbImage& img,
                      int restart_interval = 8) {
    auto fits = [&](int q) {
        JpegConfig jc;
        jc.quality = q;
        jc.restart_interval = restart_interval;
        return symbols_for_stream(jpeg_encode(img, jc).size(), m) <= symbol_budget;
    };
    if (!fits(1)) throw std::runtime_error("rate_match: budget infeasible even at quality 1");
    int lo = 1, hi = 100;
    while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        if (fits(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    while (lo < 100 && fits(lo + 1)) ++lo;
    return lo;
}

// Everything on the transmit side of the channel, all deterministic.
struct TxState {
    RgbImage reference;                      // padded original carrier
    RgbImage tx_image;                       // what was JPEG-coded (hybrid or carrier)
    int orig_w = 0, orig_h = 0;              // pre-padding carrier dims
    QuantizedPayload payload;                // empty when insertion is off
    int quality = 0;
    std::vector<uint8_t> stream;             // JPEG bytes
    long coded_symbols = 0;                  // modulated symbols before OFDM padding
    std::vector<std::complex<double>> wave;  // channel input (symbols or OFDM samples)
};

inline TxState prepare_tx(const LinkConfig& cfg) {
    if (cfg.insertion && cfg.model == nullptr) {
        throw std::runtime_error("prepare_tx: insertion requires a codec model");
    }
    const Modulation mod = Modulation::make(cfg.scheme);

    TxState tx;
    tx.orig_w = cfg.carrier.width;
    tx.orig_h = cfg.carrier.height;
    tx.reference = pad_replicate(cfg.carrier, 8);

    if (cfg.insertion) {
        const FeatureTensor feat = encode_semantic(cfg.digit, *cfg.model);
        tx.payload = quantize_features(feat, cfg.embed.q);
        InsertStats st;
        tx.tx_image = insert_payload(tx.reference, tx.payload, cfg.embed, &st);
    } else {
        tx.tx_image = tx.reference;
    }

    long budget = cfg.symbol_budget;
    if (budget < 0) {
        // Shared default: the carrier's quality-75 QPSK stream, applied to
        // every scheme so all configs spend the same number of symbols.
        JpegConfig ref;
        ref.quality = 75;
        ref.restart_interval = cfg.restart_interval;
        budget = symbols_for_stream(jpeg_encode(tx.reference, ref).size(), Modulation::make(Scheme::qpsk));
    }

    if (cfg.jpeg_quality > 0) {
        tx.quality = cfg.jpeg_quality;
    } else if (budget == 0) {
        tx.quality = 75;  // unconstrained budget: fixed default quality
    } else {
        tx.quality = rate_match(budget, mod, tx.tx_image, cfg.restart_interval);
    }

    JpegConfig jc;
    jc.quality = tx.quality;
    jc.restart_interval = cfg.restart_interval;
    tx.stream = jpeg_encode(tx.tx_image, jc);
    if (budget > 0 && cfg.jpeg_quality <= 0 && symbols_for_stream(tx.stream.size(), mod) > budget) {
        throw std::runtime_error("prepare_tx: rate-matched stream exceeds budget");
    }

    std::vector<uint8_t> bits = unpack_bits(tx.stream, tx.stream.size() * 8);
    if (bits.size() % kLdpcInfoBits != 0) {
        bits.resize((bits.size() / kLdpcInfoBits + 1) * kLdpcInfoBits, 0);
    }
    const LdpcCode& code = ldpc_wifi_648();
    std::vector<uint8_t> coded;
    coded.reserve(bits.size() * 2);
    for (size_t off = 0; off < bits.size(); off += kLdpcInfoBits) {
        std::vector<uint8_t> block(bits.begin() + static_cast<long>(off),
                                   bits.begin() + static_cast<long>(off) + kLdpcInfoBits);
        const auto cw = ldpc_encode(block, code);
        coded.insert(coded.end(), cw.begin(), cw.end());
    }

    std::vector<std::complex<double>> syms = modulate(coded, mod);
    tx.coded_symbols = static_cast<long>(syms.size());
    if (cfg.ofdm) {
        const size_t per = static_cast<size_t>(ofdm_data_per_symbol());
        if (syms.size() % per != 0) syms.resize((syms.size() / per + 1) * per, {0.0, 0.0});
        tx.wave = ofdm_frame(syms);
    } else {
        tx.wave = std::move(syms);
    }
    return tx;
}

// Optionally captures the decoded images for saving; sweeps leave it null so
// per-seed results stay small.
struct LinkArtifacts {
    RgbImage bit_image;
    GrayImage sem_image;
};

inline LinkResult run_rx(const LinkConfig& cfg, const TxState& tx, LinkArtifacts* artifacts = nullptr) {
    const Modulation mod = Modulation::make(cfg.scheme);
    LinkResult res;
    res.jpeg_quality_used = tx.quality;

    // Channel and equalization.
    std::vector<std::complex<double>> xhat;
    std::vector<double> nvar;
    if (cfg.ofdm) {
        std::vector<std::complex<double>> gains;
        const ChannelOutput ch =
            apply_channel_block(tx.wave, cfg.channel, cfg.snr_db, cfg.seed,
                                static_cast<size_t>(ofdm_symbol_len()), &gains);
        const std::vector<std::complex<double>> data = ofdm_deframe(ch.y);
        xhat.resize(data.size());
        nvar.resize(data.size());
        const size_t per = static_cast<size_t>(ofdm_data_per_symbol());
        for (size_t i = 0; i < data.size(); ++i) {
            const std::complex<double> h = gains[i / per];
            const double mag2 = std::norm(h);
            if (mag2 < 1e-24) {
                xhat[i] = {0.0, 0.0};
                nvar[i] = std::numeric_limits<double>::infinity();
            } else {
                xhat[i] = data[i] / h;
                nvar[i] = ch.noise_variance / mag2;
            }
        }
    } else {
        const ChannelOutput ch = apply_channel(tx.wave, cfg.channel, cfg.snr_db, cfg.seed);
        Equalized eq = equalize(ch);
        xhat = std::move(eq.xhat);
        nvar = std::move(eq.noise_var);
    }
    xhat.resize(static_cast<size_t>(tx.coded_symbols));
    nvar.resize(static_cast<size_t>(tx.coded_symbols));

    const std::vector<double> llr = demodulate_llr(xhat, nvar, mod);

    // LDPC decoding, block by block.
    const LdpcCode& code = ldpc_wifi_648();
    const long nblocks = static_cast<long>(llr.size()) / kLdpcCodedBits;
    std::vector<uint8_t> info_bits;
    info_bits.reserve(static_cast<size_t>(nblocks) * kLdpcInfoBits);
    long iter_sum = 0;
    for (long b = 0; b < nblocks; ++b) {
        std::vector<double> blk(llr.begin() + b * kLdpcCodedBits, llr.begin() + (b + 1) * kLdpcCodedBits);
        const LdpcDecodeResult dec = ldpc_decode(blk, code);
        info_bits.insert(info_bits.end(), dec.info.begin(), dec.info.end());
        iter_sum += dec.iterations;
        if (!dec.converged) ++res.ldpc_blocks_failed;
    }
    res.ldpc_blocks_total = static_cast<int>(nblocks);
    res.ldpc_iterations_mean = nblocks > 0 ? static_cast<double>(iter_sum) / static_cast<double>(nblocks) : 0.0;

    info_bits.resize(tx.stream.size() * 8);  // drop LDPC padding
    const std::vector<uint8_t> rx_stream = pack_bits(info_bits);

    // Source decode; an unrecoverable header leaves a mid-gray canvas.
    JpegDecodeResult dec = jpeg_decode(rx_stream);
    RgbImage rx_image;
    if (dec.status == JpegDecodeResult::Status::frame_error) {
        res.frame_status = "frame-error";
        rx_image = RgbImage(tx.tx_image.width, tx.tx_image.height);
        std::fill(rx_image.data.begin(), rx_image.data.end(), uint8_t{128});
    } else {
        res.frame_status = dec.status == JpegDecodeResult::Status::ok ? "ok" : "partial";
        rx_image = std::move(dec.image);
        if (rx_image.width != tx.tx_image.width || rx_image.height != tx.tx_image.height) {
            // Header damage that survived decoding with the wrong geometry.
            res.frame_status = "frame-error";
            rx_image = RgbImage(tx.tx_image.width, tx.tx_image.height);
            std::fill(rx_image.data.begin(), rx_image.data.end(), uint8_t{128});
        }
    }

    const RgbImage rx_cropped = crop(rx_image, tx.orig_w, tx.orig_h);
    const RgbImage ref_cropped = crop(tx.reference, tx.orig_w, tx.orig_h);
    res.psnr_bit = psnr(ref_cropped, rx_cropped);
    res.ssim_bit = ssim(ref_cropped, rx_cropped);
    if (artifacts != nullptr) artifacts->bit_image = rx_cropped;

    if (cfg.insertion) {
        const size_t nbits = tx.payload.bits.size();
        const std::vector<uint8_t> got = extract_payload_bits(rx_image, nbits, cfg.embed);
        long errors = 0;
        for (size_t i = 0; i < nbits; ++i) errors += got[i] != tx.payload.bits[i];
        res.payload_ber = nbits > 0 ? static_cast<double>(errors) / static_cast<double>(nbits) : 0.0;

        QuantizedPayload qp = tx.payload;
        qp.bits = got;
        const FeatureTensor feat = dequantize_features(qp, cfg.embed.q);
        const Plane sem = decode_semantic(feat, *cfg.model);
        const GrayImage sem_img = plane01_to_gray(sem);
        res.psnr_sem = psnr(cfg.digit, sem_img);
        res.ssim_sem = ssim(cfg.digit, sem_img);
        if (artifacts != nullptr) artifacts->sem_image = sem_img;
    }
    return res;
}

inline LinkResult run_link(const LinkConfig& cfg) { return run_rx(cfg, prepare_tx(cfg)); }

// ---------------------------------------------------------------------------
// SNR sweep over schemes and channels, with per-seed repeats.

struct SweepConfig {
    RgbImage carrier;
    GrayImage digit;
    const AutoEncoder<float>* model = nullptr;
    std::vector<Scheme> schemes{Scheme::qpsk, Scheme::qam16, Scheme::qam64};
    std::vector<ChannelKind> channels{ChannelKind::awgn, ChannelKind::rayleigh};
    std::vector<double> snrs_db{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    int repeats = 10;
    uint64_t seed = 1;
    EmbedConfig embed{14.0, 4, true};
    long symbol_budget = -1;
    bool ofdm = false;
    bool include_baseline = true;
    int jpeg_quality = 0;
    int restart_interval = 8;
};

struct SweepRow {
    std::string scheme_label;  // "qpsk" or "qpsk-jpeg-ldpc" for the baseline
    std::string channel;
    double snr_db = 0.0;
    LinkResult mean;                // metric means over repeats
    std::vector<LinkResult> runs;   // per-seed results backing the mean
};

struct SweepOutput {
    std::vector<SweepRow> rows;
};

inline LinkResult mean_result(const std::vector<LinkResult>& runs) {
    LinkResult m;
    if (runs.empty()) return m;
    double pb = 0, sb = 0, ps = 0, ss = 0, ber = 0, it = 0;
    int failed = 0, total = 0;
    int worst = 0;  // 0 ok, 1 partial, 2 frame-error
    for (const auto& r : runs) {
        pb += r.psnr_bit;
        sb += r.ssim_bit;
        ps += r.psnr_sem;
        ss += r.ssim_sem;
        ber += r.payload_ber;
        it += r.ldpc_iterations_mean;
        failed += r.ldpc_blocks_failed;
        total += r.ldpc_blocks_total;
        const int rank = r.frame_status == "ok" ? 0 : (r.frame_status == "partial" ? 1 : 2);
        worst = std::max(worst, rank);
    }
    const double n = static_cast<double>(runs.size());
    m.psnr_bit = pb / n;
    m.ssim_bit = sb / n;
    m.psnr_sem = ps / n;
    m.ssim_sem = ss / n;
    m.payload_ber = ber / n;
    m.ldpc_iterations_mean = it / n;
    m.ldpc_blocks_failed = failed;
    m.ldpc_blocks_total = total;
    m.jpeg_quality_used = runs.front().jpeg_quality_used;
    m.frame_status = worst == 0 ? "ok" : (worst == 1 ? "partial" : "frame-error");
    return m;
}

inline SweepOutput run_sweep(const SweepConfig& sc) {
    SweepOutput out;
    uint64_t grid = 0;
    const int modes = sc.include_baseline ? 2 : 1;
    for (int mode = 0; mode < modes; ++mode) {       // 0 = hybrid, 1 = baseline
        for (const Scheme scheme : sc.schemes) {
            LinkConfig base;
            base.carrier = sc.carrier;
            base.digit = sc.digit;
            base.model = sc.model;
            base.scheme = scheme;
            base.embed = sc.embed;
            base.jpeg_quality = sc.jpeg_quality;
            base.symbol_budget = sc.symbol_budget;
            base.ofdm = sc.ofdm;
            base.insertion = mode == 0;
            base.restart_interval = sc.restart_interval;
            const TxState tx = prepare_tx(base);
            const std::string label =
                mode == 0 ? scheme_name(scheme) : std::string(scheme_name(scheme)) + "-jpeg-ldpc";
            for (const ChannelKind ch : sc.channels) {
                for (const double snr : sc.snrs_db) {
                    SweepRow row;
                    row.scheme_label = label;
                    row.channel = channel_name(ch);
                    row.snr_db = snr;
                    for (int rep = 0; rep < sc.repeats; ++rep) {
                        LinkConfig cfg = base;
                        cfg.channel = ch;
                        cfg.snr_db = snr;
                        cfg.seed = derive_seed(sc.seed, grid, static_cast<uint64_t>(rep));
                        row.runs.push_back(run_rx(cfg, tx));
                    }
                    row.mean = mean_result(row.runs);
                    out.rows.push_back(std::move(row));
                    ++grid;
                }
            }
        }
    }
    return out;
}

}  // namespace hbsc
