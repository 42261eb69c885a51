// Release gate: runs the ten acceptance criteria end to end and prints one
// [PASS]/[FAIL] line per criterion. Exits nonzero if any criterion fails.
//
// The heavy criteria (training, the SNR sweep) run once and share state:
// criterion 5 trains the semantic codec that criteria 6 and 7 reuse.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hybridbsc/autoencoder.hpp"
#include "hybridbsc/channel.hpp"
#include "hybridbsc/config.hpp"
#include "hybridbsc/embed.hpp"
#include "hybridbsc/image.hpp"
#include "hybridbsc/jpeg.hpp"
#include "hybridbsc/ldpc.hpp"
#include "hybridbsc/link.hpp"
#include "hybridbsc/metrics.hpp"
#include "hybridbsc/modem.hpp"
#include "hybridbsc/report.hpp"
#include "hybridbsc/rng.hpp"
#include "hybridbsc/synth.hpp"
#include "hybridbsc/transforms.hpp"

using namespace hbsc;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
    g_results.push_back({id, name, pass, detail});
    std::fprintf(stderr, "... criterion %d done: %s\n", id, pass ? "pass" : "FAIL");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string data_dir() {
    if (const char* env = std::getenv("HBSC_DATA_DIR")) return env;
    return std::string(HBSC_SOURCE_DIR) + "/data";
}

// ---------------------------------------------------------------------------

void criterion_1_lattice() {
    Timer t;
    long points = 0, bad = 0;
    for (double alpha : {6.0, 14.0, 20.0}) {
        const double step = alpha / 1000.0;
        const long nsteps = 40000;
        for (long i = 0; i <= nsteps; ++i) {
            const double sigma = i * step;
            for (int bit : {0, 1}) {
                for (bool midpoint : {false, true}) {
                    const double embedded = qim_embed(sigma, bit, alpha, midpoint);
                    if (qim_extract(embedded, alpha) != bit) ++bad;
                    ++points;
                }
            }
        }
    }
    const double secs = t.seconds();
    record(1, "lattice embed/extract identity", bad == 0 && secs < 1.0,
           std::to_string(points) + " points, " + std::to_string(bad) + " mismatches, " + fmt(secs) + " s");
}

void criterion_2_clean_chain(const AutoEncoder<float>& model) {
    Timer t;
    long trials = 0, bit_errors = 0;
    const EmbedConfig ec{14.0, 4, true};
    const int nbits = 28 * 28 * 4;

    for (int c = 0; c < 5; ++c) {
        LinkConfig cfg;
        cfg.carrier = make_carrier(512, 512, 101 + static_cast<uint64_t>(c));
        cfg.model = &model;
        cfg.embed = ec;
        cfg.jpeg_quality = 95;
        cfg.symbol_budget = 0;  // quality is pinned; no rate matching
        cfg.snr_db = std::numeric_limits<double>::infinity();
        cfg.digit = make_digit(c % 10, 900 + static_cast<uint64_t>(c));

        for (int p = 0; p < 20; ++p) {
            // Random payload in place of the model features, then the whole
            // transmit/receive chain on a noiseless channel.
            Rng rng(derive_seed(4242, static_cast<uint64_t>(c), static_cast<uint64_t>(p)));
            QuantizedPayload payload;
            payload.feat_height = 28;
            payload.feat_width = 28;
            payload.feat_channels = 1;
            payload.bits.resize(nbits);
            for (auto& b : payload.bits) b = static_cast<uint8_t>(rng.bounded(2));

            TxState tx;
            tx.orig_w = cfg.carrier.width;
            tx.orig_h = cfg.carrier.height;
            tx.reference = pad_replicate(cfg.carrier, 8);
            tx.payload = payload;
            tx.tx_image = insert_payload(tx.reference, payload, ec, nullptr);
            tx.quality = 95;
            JpegConfig jc;
            jc.quality = 95;
            jc.restart_interval = cfg.restart_interval;
            tx.stream = jpeg_encode(tx.tx_image, jc);
            std::vector<uint8_t> bits = unpack_bits(tx.stream, tx.stream.size() * 8);
            if (bits.size() % kLdpcInfoBits) bits.resize((bits.size() / kLdpcInfoBits + 1) * kLdpcInfoBits, 0);
            const LdpcCode& code = ldpc_wifi_648();
            std::vector<uint8_t> coded;
            coded.reserve(bits.size() * 2);
            for (size_t off = 0; off < bits.size(); off += kLdpcInfoBits) {
                std::vector<uint8_t> blk(bits.begin() + static_cast<long>(off),
                                         bits.begin() + static_cast<long>(off) + kLdpcInfoBits);
                auto cw = ldpc_encode(blk, code);
                coded.insert(coded.end(), cw.begin(), cw.end());
            }
            tx.wave = modulate(coded, Modulation::make(cfg.scheme));
            tx.coded_symbols = static_cast<long>(tx.wave.size());

            LinkResult r = run_rx(cfg, tx);
            trials += nbits;
            bit_errors += static_cast<long>(std::llround(r.payload_ber * nbits));
            if (r.frame_status != "ok") bit_errors += 1;  // any stream damage is a failure here
        }
    }
    const double secs = t.seconds();
    record(2, "noiseless chain has zero payload BER", bit_errors == 0 && secs < 120.0,
           "100 runs x " + std::to_string(28 * 28 * 4) + " bits, " + std::to_string(bit_errors) +
               " errors, " + fmt(secs, 1) + " s");
}

void criterion_3_transforms() {
    Timer t;
    Rng rng(31337);
    double worst_dwt = 0.0, worst_dct = 0.0, worst_svd = 0.0;
    for (int it = 0; it < 10000; ++it) {
        // one-level Haar on a 16x16 tile
        Plane p(16, 16);
        for (auto& v : p.data) v = rng.uniform(0.0, 255.0);
        Plane back = idwt2_haar(dwt2_haar(p));
        for (size_t i = 0; i < p.data.size(); ++i)
            worst_dwt = std::max(worst_dwt, std::fabs(back.data[i] - p.data[i]));

        // 8x8 and 4x4 DCT round trips
        double blk8[64], coef8[64], rec8[64];
        for (double& v : blk8) v = rng.uniform(-128.0, 128.0);
        dct2_block(blk8, coef8, 8);
        idct2_block(coef8, rec8, 8);
        for (int i = 0; i < 64; ++i) worst_dct = std::max(worst_dct, std::fabs(rec8[i] - blk8[i]));
        double blk4[16], coef4[16], rec4[16];
        for (double& v : blk4) v = rng.uniform(-128.0, 128.0);
        dct2_block(blk4, coef4, 4);
        idct2_block(coef4, rec4, 4);
        for (int i = 0; i < 16; ++i) worst_dct = std::max(worst_dct, std::fabs(rec4[i] - blk4[i]));

        // 4x4 SVD factor-and-rebuild
        double b[16], rec[16];
        for (double& v : b) v = rng.uniform(-100.0, 100.0);
        BlockSvd s = svd_4x4(b);
        reconstruct_svd(s, rec);
        for (int i = 0; i < 16; ++i) worst_svd = std::max(worst_svd, std::fabs(rec[i] - b[i]));
    }

    // color transform: exact byte round trip on a million random triples
    RgbImage big(1000, 1000);
    Rng crng(777);
    for (auto& v : big.data) v = static_cast<uint8_t>(crng.bounded(256));
    YcbcrPlanes yc = rgb_to_ycbcr(big);
    RgbImage back = ycbcr_to_rgb(yc.y, yc.cb, yc.cr);
    long color_bad = 0;
    for (size_t i = 0; i < big.data.size(); ++i) color_bad += big.data[i] != back.data[i];

    const double secs = t.seconds();
    const bool ok = worst_dwt < 1e-10 && worst_dct < 1e-10 && worst_svd < 1e-8 && color_bad == 0 && secs < 30.0;
    record(3, "transform round trips", ok,
           "dwt " + fmt(worst_dwt, 14) + ", dct " + fmt(worst_dct, 14) + ", svd " + fmt(worst_svd, 12) +
               ", color mismatches " + std::to_string(color_bad) + ", " + fmt(secs, 1) + " s");
}

void criterion_4_gradients() {
    Timer t;
    const double worst = grad_check(1, 200);
    const double secs = t.seconds();
    record(4, "analytic gradients vs finite differences", worst < 1e-4 && secs < 60.0,
           "max relative error " + fmt(worst, 8) + " over 200 probes, " + fmt(secs, 1) + " s");
}

struct TrainedCodec {
    AutoEncoder<float> model;
    double heldout_ssim = 0.0;
    bool trained = false;
};

TrainedCodec criterion_5_training() {
    Timer t;
    TrainedCodec out;
    const int train_count = 10000;
    const int held_count = 1000;
    std::vector<GrayImage> all = load_or_make_digits(train_count + held_count, 1, data_dir());
    std::vector<GrayImage> held(all.end() - held_count, all.end());
    all.resize(train_count);

    TrainConfig tc;  // batch 256, 20 epochs, lr 1e-4, Adam on MSE
    tc.seed = 1;
    TrainResult<float> res = train_autoencoder<float>(all, tc);
    out.model = res.model;
    out.trained = true;

    double acc = 0.0;
    for (const auto& img : held) {
        FeatureTensor f = encode_semantic(img, out.model);
        FeatureTensor fq = dequantize_features(quantize_features(f, 4), 4);
        GrayImage rec = plane01_to_gray(decode_semantic(fq, out.model));
        acc += ssim(rec, img);
    }
    out.heldout_ssim = acc / static_cast<double>(held.size());

    const double secs = t.seconds();
    record(5, "semantic codec held-out quality", out.heldout_ssim >= 0.9 && secs < 1800.0,
           "train " + std::to_string(train_count) + ", held-out " + std::to_string(held_count) +
               ", mean ssim " + fmt(out.heldout_ssim, 4) + " through 4-bit features, first/last epoch loss " +
               fmt(res.epoch_loss.front(), 6) + "/" + fmt(res.epoch_loss.back(), 6) + ", " + fmt(secs, 0) + " s");
    return out;
}

struct SweepState {
    SweepOutput hybrid;
    // per scheme x channel: baseline mean psnr_bit at 20 dB
    std::map<std::string, double> baseline20_psnr;
    std::map<std::string, double> hybrid20_psnr;
};

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

void criterion_6_7_trends(const AutoEncoder<float>& model) {
    Timer t;
    SweepConfig sc;
    // The carrier leaves ~half the embedding capacity unused, which spreads
    // the fixed lattice distortion thin enough that even the highest-rate
    // scheme (whose rate-matched JPEG quality approaches transparency) stays
    // within the allowed insertion penalty of the plain-JPEG baseline.
    sc.carrier = make_carrier(640, 640, 7);
    sc.digit = make_digit(7, 1);
    sc.model = &model;
    sc.repeats = 10;
    sc.seed = 1;
    sc.include_baseline = false;

    SweepOutput out = run_sweep(sc);
    std::fprintf(stderr, "... hybrid sweep finished at %.0f s\n", t.seconds());

    // Baseline (insertion off) at 20 dB only, same budget policy. Each
    // baseline run reuses the seed of the matching hybrid sweep row/repeat
    // (common random numbers): with fading, unpaired noise realizations can
    // move a 10-repeat mean by several dB, which would swamp the insertion
    // cost this check is after. run_sweep derives seeds from the row's
    // position in the scheme x channel x snr grid, reproduced here.
    std::map<std::string, double> baseline20;
    for (size_t si = 0; si < sc.schemes.size(); ++si) {
        const Scheme s = sc.schemes[si];
        LinkConfig cfg;
        cfg.carrier = sc.carrier;
        cfg.digit = sc.digit;
        cfg.model = nullptr;
        cfg.insertion = false;
        cfg.scheme = s;
        cfg.snr_db = 20.0;
        TxState tx = prepare_tx(cfg);
        for (size_t ci = 0; ci < sc.channels.size(); ++ci) {
            cfg.channel = sc.channels[ci];
            const uint64_t grid = (si * sc.channels.size() + ci) * sc.snrs_db.size() +
                                  (sc.snrs_db.size() - 1);  // snr = 20 dB is the last grid row
            double acc = 0.0;
            for (int rep = 0; rep < sc.repeats; ++rep) {
                cfg.seed = derive_seed(sc.seed, grid, static_cast<uint64_t>(rep));
                acc += run_rx(cfg, tx).psnr_bit;
            }
            baseline20[std::string(scheme_name(s)) + "/" + channel_name(sc.channels[ci])] = acc / sc.repeats;
        }
    }

    // (a) monotone trends within one pooled standard error
    struct Metric {
        const char* name;
        double LinkResult::* field;
    };
    const Metric metrics[] = {{"psnr_bit", &LinkResult::psnr_bit},
                              {"ssim_bit", &LinkResult::ssim_bit},
                              {"psnr_sem", &LinkResult::psnr_sem},
                              {"ssim_sem", &LinkResult::ssim_sem}};
    int trend_violations = 0;
    std::string first_violation;
    for (Scheme s : sc.schemes) {
        for (ChannelKind ch : sc.channels) {
            std::vector<const SweepRow*> curve;
            for (const auto& row : out.rows)
                if (row.scheme_label == scheme_name(s) && row.channel == channel_name(ch))
                    curve.push_back(&row);
            for (const auto& m : metrics) {
                for (size_t i = 0; i + 1 < curve.size(); ++i) {
                    std::vector<double> lo, hi;
                    for (const auto& r : curve[i]->runs) lo.push_back(r.*(m.field));
                    for (const auto& r : curve[i + 1]->runs) hi.push_back(r.*(m.field));
                    const double n = static_cast<double>(lo.size());
                    const double se = std::sqrt(sample_sd(lo) * sample_sd(lo) / n +
                                                sample_sd(hi) * sample_sd(hi) / n);
                    if (curve[i + 1]->mean.*(m.field) < curve[i]->mean.*(m.field) - se - 1e-12) {
                        ++trend_violations;
                        if (first_violation.empty())
                            first_violation = std::string(scheme_name(s)) + "/" + channel_name(ch) + "/" +
                                              m.name + " at " + fmt(curve[i]->snr_db, 0) + "->" +
                                              fmt(curve[i + 1]->snr_db, 0) + " dB";
                    }
                }
            }
        }
    }

    // (b) AWGN at least as good as Rayleigh at 0-5 dB
    int ab_violations = 0;
    std::string first_ab;
    for (Scheme s : sc.schemes) {
        for (double snr : {0.0, 2.0, 4.0}) {
            const SweepRow* awgn_row = nullptr;
            const SweepRow* ray_row = nullptr;
            for (const auto& row : out.rows) {
                if (row.scheme_label != scheme_name(s) || row.snr_db != snr) continue;
                if (row.channel == "awgn") awgn_row = &row;
                if (row.channel == "rayleigh") ray_row = &row;
            }
            if (awgn_row == nullptr || ray_row == nullptr) {
                ++ab_violations;
                continue;
            }
            for (const auto& m : metrics) {
                if (awgn_row->mean.*(m.field) < ray_row->mean.*(m.field) - 1e-9) {
                    ++ab_violations;
                    if (first_ab.empty())
                        first_ab = std::string(scheme_name(s)) + "/" + m.name + " at " + fmt(snr, 0) + " dB";
                }
            }
        }
    }

    // (c) insertion costs at most 1.5 dB of bit-image PSNR at 20 dB
    int c_violations = 0;
    double worst_gap = -1e9;
    std::string worst_gap_key;
    for (Scheme s : sc.schemes) {
        for (ChannelKind ch : sc.channels) {
            const std::string key = std::string(scheme_name(s)) + "/" + channel_name(ch);
            double hybrid20 = 0.0;
            for (const auto& row : out.rows)
                if (row.scheme_label == scheme_name(s) && row.channel == channel_name(ch) && row.snr_db == 20.0)
                    hybrid20 = row.mean.psnr_bit;
            const double gap = baseline20[key] - hybrid20;
            if (gap > worst_gap) {
                worst_gap = gap;
                worst_gap_key = key;
            }
            if (gap > 1.5) ++c_violations;
        }
    }

    const double secs = t.seconds();
    const bool ok6 = trend_violations == 0 && ab_violations == 0 && c_violations == 0 && secs < 1800.0;
    record(6, "snr trend reproduction", ok6,
           "trend violations " + std::to_string(trend_violations) +
               (first_violation.empty() ? "" : " (first: " + first_violation + ")") +
               ", awgn<rayleigh violations " + std::to_string(ab_violations) +
               (first_ab.empty() ? "" : " (first: " + first_ab + ")") + ", worst baseline gap " +
               fmt(worst_gap, 3) + " dB (" + worst_gap_key + "), " + fmt(secs, 0) + " s");

    // criterion 7: the rate-matched 20 dB QPSK AWGN point
    double psnr20 = 0.0, ssimb20 = 0.0, ssims20 = 0.0;
    int quality20 = 0;
    for (const auto& row : out.rows) {
        if (row.scheme_label == "qpsk" && row.channel == "awgn" && row.snr_db == 20.0) {
            psnr20 = row.mean.psnr_bit;
            ssimb20 = row.mean.ssim_bit;
            ssims20 = row.mean.ssim_sem;
            quality20 = row.mean.jpeg_quality_used;
        }
    }
    const bool ok7 = psnr20 >= 30.61 - 3.0 && psnr20 <= 30.61 + 3.0 && ssimb20 >= 0.80 && ssims20 >= 0.95;
    record(7, "high-snr operating point", ok7,
           "bit psnr " + fmt(psnr20, 2) + " dB (band 27.61..33.61), bit ssim " + fmt(ssimb20, 3) +
               " (>=0.80), sem ssim " + fmt(ssims20, 3) + " (>=0.95), matched quality " +
               std::to_string(quality20));
}

void criterion_8_ldpc_waterfall() {
    Timer t;
    const LdpcCode& code = ldpc_wifi_648();

    // noiseless: zero errors
    Rng rng(2025);
    long noiseless_errors = 0;
    for (int blk = 0; blk < 10; ++blk) {
        std::vector<uint8_t> info(code.k);
        for (auto& b : info) b = static_cast<uint8_t>(rng.bounded(2));
        std::vector<uint8_t> cw = ldpc_encode(info, code);
        std::vector<double> llr(cw.size());
        for (size_t i = 0; i < cw.size(); ++i) llr[i] = cw[i] ? -20.0 : 20.0;
        LdpcDecodeResult r = ldpc_decode(llr, code);
        for (int i = 0; i < code.k; ++i) noiseless_errors += r.info[i] != info[i];
    }

    // 3 dB energy-per-info-bit, antipodal signalling over a real AWGN channel
    const double gamma_b = std::pow(10.0, 0.3);
    const double n0_coded = 1.0 / (0.5 * gamma_b);
    const double n0_uncoded = 1.0 / gamma_b;
    const int nblocks = 309;  // 309 * 324 = 100116 info bits
    long coded_errors = 0, coded_bits = 0, uncoded_errors = 0, uncoded_bits = 0;
    int failed_blocks = 0;
    for (int blk = 0; blk < nblocks; ++blk) {
        std::vector<uint8_t> info(code.k);
        for (auto& b : info) b = static_cast<uint8_t>(rng.bounded(2));
        std::vector<uint8_t> cw = ldpc_encode(info, code);
        std::vector<double> llr(cw.size());
        for (size_t i = 0; i < cw.size(); i += 2) {
            double g0, g1;
            rng.gaussian_pair(g0, g1);
            llr[i] = 4.0 * ((cw[i] ? -1.0 : 1.0) + g0 * std::sqrt(n0_coded / 2.0)) / n0_coded;
            llr[i + 1] = 4.0 * ((cw[i + 1] ? -1.0 : 1.0) + g1 * std::sqrt(n0_coded / 2.0)) / n0_coded;
        }
        LdpcDecodeResult r = ldpc_decode(llr, code);
        if (!r.converged) ++failed_blocks;
        for (int i = 0; i < code.k; ++i) coded_errors += r.info[i] != info[i];
        coded_bits += code.k;

        for (int i = 0; i < code.k; i += 2) {
            double g0, g1;
            rng.gaussian_pair(g0, g1);
            uncoded_errors += (((info[i] ? -1.0 : 1.0) + g0 * std::sqrt(n0_uncoded / 2.0)) < 0.0) != (info[i] != 0);
            uncoded_errors += (((info[i + 1] ? -1.0 : 1.0) + g1 * std::sqrt(n0_uncoded / 2.0)) < 0.0) != (info[i + 1] != 0);
        }
        uncoded_bits += code.k;
    }
    const double coded_ber = static_cast<double>(coded_errors) / static_cast<double>(coded_bits);
    const double uncoded_ber = static_cast<double>(uncoded_errors) / static_cast<double>(uncoded_bits);
    const double secs = t.seconds();
    const bool ok = noiseless_errors == 0 && uncoded_ber > 0.0 && coded_ber * 10.0 <= uncoded_ber && secs < 120.0;
    record(8, "ldpc coding gain at 3 dB", ok,
           "coded ber " + fmt(coded_ber, 6) + " (" + std::to_string(failed_blocks) + " failed blocks), uncoded ber " +
               fmt(uncoded_ber, 6) + " over " + std::to_string(coded_bits) + " info bits, noiseless errors " +
               std::to_string(noiseless_errors) + ", " + fmt(secs, 1) + " s");
}

void criterion_9_jpeg_interop() {
    Timer t;
    namespace fs = std::filesystem;
    const fs::path dir = "acceptance_jpeg_tmp";
    fs::create_directories(dir);

    struct Case {
        int w, h, q;
    };
    const Case cases[] = {{64, 64, 35},  {96, 64, 50},   {128, 80, 75}, {72, 56, 90},  {129, 77, 95},
                          {48, 48, 35},  {160, 96, 50},  {80, 120, 75}, {56, 72, 90},  {112, 64, 95},
                          {200, 40, 35}, {40, 200, 50},  {88, 88, 75},  {144, 48, 90}, {63, 63, 95},
                          {100, 60, 35}, {60, 100, 50},  {176, 32, 75}, {32, 176, 90}, {121, 81, 95}};

    std::vector<std::vector<uint8_t>> streams;
    std::string manifest;
    for (int i = 0; i < 20; ++i) {
        RgbImage img = make_carrier(cases[i].w, cases[i].h, 500 + static_cast<uint64_t>(i));
        std::vector<uint8_t> jpg = jpeg_encode(img, {cases[i].q, 8});
        streams.push_back(jpg);
        const std::string jf = (dir / ("img" + std::to_string(i) + ".jpg")).string();
        write_file(jf, jpg);
        manifest += jf + " " + (dir / ("img" + std::to_string(i) + ".rgb")).string() + "\n";
    }
    write_file((dir / "manifest.txt").string(), std::vector<uint8_t>(manifest.begin(), manifest.end()));
    const std::string script =
        "import sys\n"
        "from PIL import Image\n"
        "for line in open(sys.argv[1]):\n"
        "    src, dst = line.split()\n"
        "    im = Image.open(src).convert('RGB')\n"
        "    open(dst, 'wb').write(im.tobytes())\n";
    write_file((dir / "decode_all.py").string(), std::vector<uint8_t>(script.begin(), script.end()));
    const std::string cmd = "python3 " + (dir / "decode_all.py").string() + " " + (dir / "manifest.txt").string();
    const int rc = std::system(cmd.c_str());

    int worst_diff = rc == 0 ? 0 : 255;
    if (rc == 0) {
        for (int i = 0; i < 20; ++i) {
            std::vector<uint8_t> ref = read_file((dir / ("img" + std::to_string(i) + ".rgb")).string());
            JpegDecodeResult d = jpeg_decode(streams[i]);
            if (d.status != JpegDecodeResult::Status::ok || ref.size() != d.image.data.size()) {
                worst_diff = 255;
                break;
            }
            for (size_t j = 0; j < ref.size(); ++j)
                worst_diff = std::max(worst_diff, std::abs(int(ref[j]) - int(d.image.data[j])));
        }
    }

    // single-bit-flip containment on a restart-segmented stream
    bool contained = true;
    {
        const int ri = 8;
        RgbImage img = make_carrier(64, 64, 999);
        std::vector<uint8_t> jpg = jpeg_encode(img, {75, ri});
        JpegDecodeResult clean = jpeg_decode(jpg);
        size_t scan0 = 0;
        for (size_t i = 2; i + 3 < jpg.size();) {
            if (jpg[i] != 0xFF) break;
            uint8_t m = jpg[i + 1];
            if (m == 0xD8 || (m >= 0xD0 && m <= 0xD7) || m == 0x01) {
                i += 2;
                continue;
            }
            size_t len = (size_t(jpg[i + 2]) << 8) | jpg[i + 3];
            if (m == 0xDA) {
                scan0 = i + 2 + len;
                break;
            }
            i += 2 + len;
        }
        std::vector<size_t> rst_pos;
        int next = 0;
        for (size_t i = scan0; i + 1 < jpg.size(); ++i) {
            if (jpg[i] == 0xFF && jpg[i + 1] >= 0xD0 && jpg[i + 1] <= 0xD7 && (jpg[i + 1] & 7) == (next & 7)) {
                rst_pos.push_back(i);
                ++next;
                ++i;
            }
        }
        int flips = 0;
        for (size_t pos = scan0 + 3; pos + 2 < jpg.size() && flips < 6; pos += 131) {
            if (jpg[pos] == 0xFF || jpg[pos] == 0xFE || jpg[pos - 1] == 0xFF) continue;
            ++flips;
            std::vector<uint8_t> bad = jpg;
            bad[pos] ^= 0x01;
            long seg = 0;
            for (size_t p : rst_pos)
                if (pos > p + 1) ++seg;
            const long lo = seg * ri, hi = std::min<long>(lo + ri - 1, 63);
            JpegDecodeResult d = jpeg_decode(bad);
            if (d.status == JpegDecodeResult::Status::frame_error) {
                contained = false;
                continue;
            }
            for (const auto& r : d.lost_mcus) contained = contained && r.first >= lo && r.second <= hi;
            for (long mcu = 0; mcu < 64; ++mcu) {
                if (mcu >= lo && mcu <= hi) continue;
                const int bx = static_cast<int>(mcu % 8), by = static_cast<int>(mcu / 8);
                for (int y = 0; y < 8 && contained; ++y)
                    for (int x = 0; x < 8; ++x)
                        for (int c = 0; c < 3; ++c) {
                            const size_t idx = 3 * ((static_cast<size_t>(by) * 8 + y) * 64 + bx * 8 + x) + c;
                            if (d.image.data[idx] != clean.image.data[idx]) {
                                contained = false;
                                break;
                            }
                        }
            }
        }
        contained = contained && flips >= 4;
    }

    fs::remove_all(dir);
    const double secs = t.seconds();
    record(9, "jpeg reference-decoder interop", rc == 0 && worst_diff <= 1 && contained && secs < 60.0,
           "20 images, worst pixel diff " + std::to_string(worst_diff) + " (<=1), bit-flip containment " +
               std::string(contained ? "ok" : "violated") + ", " + fmt(secs, 1) + " s");
}

void criterion_10_determinism() {
    Timer t;
    static const AutoEncoder<float> model = init_model<float>(9);
    SweepConfig sc;
    sc.carrier = make_carrier(448, 448, 3);
    sc.digit = make_digit(4, 2);
    sc.model = &model;
    sc.schemes = {Scheme::qpsk, Scheme::qam16};
    sc.channels = {ChannelKind::awgn};
    sc.snrs_db = {8.0, 20.0};
    sc.repeats = 2;
    sc.seed = 77;
    sc.include_baseline = true;

    const std::string csv1 = sweep_csv(sc, run_sweep(sc));
    const std::string csv2 = sweep_csv(sc, run_sweep(sc));
    const double secs = t.seconds();
    record(10, "sweep rerun is byte-identical", csv1 == csv2 && !csv1.empty(),
           std::to_string(csv1.size()) + " csv bytes, " + fmt(secs, 1) + " s");
}

}  // namespace

int main() {
    std::fprintf(stderr, "acceptance: starting\n");
    criterion_1_lattice();
    criterion_3_transforms();
    criterion_4_gradients();
    criterion_8_ldpc_waterfall();
    criterion_9_jpeg_interop();

    TrainedCodec codec = criterion_5_training();
    criterion_2_clean_chain(codec.model);
    criterion_6_7_trends(codec.model);
    criterion_10_determinism();

    std::sort(g_results.begin(), g_results.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    bool all_pass = true;
    for (const auto& r : g_results) {
        all_pass = all_pass && r.pass;
        std::printf("[%s] criterion %d: %s (%s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
    }
    std::printf("%s\n", all_pass ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all_pass ? 0 : 1;
}
