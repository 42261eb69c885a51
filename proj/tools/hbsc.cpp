// Command-line front end: train the semantic codec, run single links, sweep
// SNR grids, and run the embed/extract/metrics stages standalone.
//
// Image arguments accept files (.ppm / .pgm) or procedural sources:
//   carrier:  path.ppm | synth:WxH:SEED
//   digit:    path.pgm | synth:CLASS:SEED | idx:path:INDEX
//
// Exit codes: 0 success, 1 usage/config error, 2 frame-error from a run.
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridbsc/autoencoder.hpp"
#include "hybridbsc/config.hpp"
#include "hybridbsc/image.hpp"
#include "hybridbsc/link.hpp"
#include "hybridbsc/metrics.hpp"
#include "hybridbsc/report.hpp"
#include "hybridbsc/synth.hpp"

namespace {

std::string env_data_dir() {
    const char* v = std::getenv("HBSC_DATA_DIR");
    return v ? v : "";
}

hbsc::RgbImage parse_carrier(const std::string& arg) {
    if (arg.rfind("synth:", 0) == 0) {
        int w = 512, h = 512;
        unsigned long long seed = 1;
        if (std::sscanf(arg.c_str(), "synth:%dx%d:%llu", &w, &h, &seed) < 2) {
            throw std::runtime_error("bad synth carrier spec (use synth:WxH:SEED): " + arg);
        }
        return hbsc::make_carrier(w, h, seed);
    }
    return hbsc::load_ppm_file(arg);
}

hbsc::GrayImage parse_digit(const std::string& arg) {
    if (arg.rfind("synth:", 0) == 0) {
        int cls = 0;
        unsigned long long seed = 1;
        if (std::sscanf(arg.c_str(), "synth:%d:%llu", &cls, &seed) < 1) {
            throw std::runtime_error("bad synth digit spec (use synth:CLASS:SEED): " + arg);
        }
        return hbsc::make_digit(cls, seed);
    }
    if (arg.rfind("idx:", 0) == 0) {
        const size_t colon = arg.rfind(':');
        if (colon == 3) throw std::runtime_error("bad idx digit spec (use idx:path:INDEX): " + arg);
        const std::string path = arg.substr(4, colon - 4);
        const size_t index = std::stoul(arg.substr(colon + 1));
        auto all = hbsc::load_idx(hbsc::read_file(path));
        if (index >= all.size()) throw std::runtime_error("idx digit index out of range");
        return all[index];
    }
    return hbsc::load_pgm_file(arg);
}

hbsc::Scheme parse_scheme(const std::string& s) { return hbsc::scheme_from_name(s); }

long parse_budget(const std::string& s) {
    if (s == "auto") return -1;
    if (s == "unconstrained") return 0;
    return std::stol(s);
}

void print_result(const hbsc::LinkResult& r) {
    std::printf("psnr_bit=%s\n", hbsc::format_metric(r.psnr_bit).c_str());
    std::printf("ssim_bit=%s\n", hbsc::format_metric(r.ssim_bit).c_str());
    std::printf("psnr_sem=%s\n", hbsc::format_metric(r.psnr_sem).c_str());
    std::printf("ssim_sem=%s\n", hbsc::format_metric(r.ssim_sem).c_str());
    std::printf("payload_ber=%s\n", hbsc::format_metric(r.payload_ber).c_str());
    std::printf("quality=%d\n", r.jpeg_quality_used);
    std::printf("frame_status=%s\n", r.frame_status.c_str());
    std::printf("ldpc_iterations_mean=%s\n", hbsc::format_metric(r.ldpc_iterations_mean).c_str());
    std::printf("ldpc_blocks_failed=%d\n", r.ldpc_blocks_failed);
    std::printf("ldpc_blocks_total=%d\n", r.ldpc_blocks_total);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HybridBSC link simulator"};
    app.require_subcommand(1);

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train the semantic autoencoder");
    std::string train_out = "model.bin", train_data_dir = env_data_dir(), train_loss_out;
    int train_count = 10000;
    hbsc::TrainConfig tc;
    train->add_option("--out", train_out, "Checkpoint output path");
    train->add_option("--count", train_count, "Number of training digits");
    train->add_option("--epochs", tc.epochs, "Training epochs");
    train->add_option("--batch", tc.batch_size, "Batch size");
    train->add_option("--lr", tc.lr, "Learning rate");
    train->add_option("--seed", tc.seed, "Training seed");
    train->add_option("--data-dir", train_data_dir, "Dataset directory (IDX files); default $HBSC_DATA_DIR");
    train->add_option("--loss-out", train_loss_out, "Optional CSV of per-epoch loss");

    // ---- run ----
    auto* run = app.add_subcommand("run", "Run one end-to-end link");
    std::string run_carrier = "synth:512x512:7", run_digit = "synth:3:7", run_model = "model.bin";
    std::string run_scheme = "qpsk", run_channel = "awgn", run_budget = "auto";
    std::string run_out_bit, run_out_sem;
    double run_snr = 20.0, run_alpha = 14.0;
    int run_quality = 0, run_qbits = 4, run_restart = 8;
    bool run_ofdm = false, run_no_insertion = false, run_no_midpoint = false;
    uint64_t run_seed = 0;
    run->add_option("--carrier", run_carrier, "Carrier image");
    run->add_option("--digit", run_digit, "Semantic digit image");
    run->add_option("--model", run_model, "Codec checkpoint");
    run->add_option("--scheme", run_scheme, "qpsk | 16qam | 64qam");
    run->add_option("--channel", run_channel, "awgn | rayleigh");
    run->add_option("--snr", run_snr, "SNR in dB");
    run->add_option("--quality", run_quality, "JPEG quality (0 = rate-matched)");
    run->add_option("--budget", run_budget, "Symbol budget: auto | unconstrained | N");
    run->add_option("--alpha", run_alpha, "Insertion factor");
    run->add_option("--qbits", run_qbits, "Feature quantizer bits");
    run->add_option("--restart", run_restart, "JPEG restart interval (MCUs)");
    run->add_flag("--ofdm", run_ofdm, "Wrap symbols in OFDM framing");
    run->add_flag("--no-insertion", run_no_insertion, "Baseline: plain JPEG-LDPC");
    run->add_flag("--lattice-point", run_no_midpoint, "Embed at the lattice point instead of the cell midpoint");
    run->add_option("--out-bit", run_out_bit, "Save received bit image (PPM)");
    run->add_option("--out-sem", run_out_sem, "Save reconstructed semantic image (PGM)");
    run->add_option("--seed", run_seed, "Channel seed")->required();

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "Run an SNR sweep from a config file");
    std::string sweep_config, sweep_out_dir = "sweep_out";
    uint64_t sweep_seed = 0;
    sweep->add_option("--config", sweep_config, "INI config")->required();
    sweep->add_option("--out-dir", sweep_out_dir, "Output directory");
    sweep->add_option("--seed", sweep_seed, "Root seed")->required();

    // ---- embed ----
    auto* embed = app.add_subcommand("embed", "Embed a digit into a carrier (no channel)");
    std::string em_carrier = "synth:512x512:7", em_digit = "synth:3:7", em_model = "model.bin", em_out = "hybrid.ppm";
    double em_alpha = 14.0;
    int em_qbits = 4;
    bool em_no_midpoint = false;
    embed->add_option("--carrier", em_carrier, "Carrier image");
    embed->add_option("--digit", em_digit, "Semantic digit image");
    embed->add_option("--model", em_model, "Codec checkpoint");
    embed->add_option("--alpha", em_alpha, "Insertion factor");
    embed->add_option("--qbits", em_qbits, "Feature quantizer bits");
    embed->add_flag("--lattice-point", em_no_midpoint, "Embed at the lattice point instead of the cell midpoint");
    embed->add_option("--out", em_out, "Hybrid image output (PPM)");

    // ---- extract ----
    auto* extract = app.add_subcommand("extract", "Extract and decode a digit from a hybrid image");
    std::string ex_image, ex_model = "model.bin", ex_out = "digit.pgm";
    double ex_alpha = 14.0;
    int ex_qbits = 4;
    extract->add_option("--image", ex_image, "Hybrid image (PPM)")->required();
    extract->add_option("--model", ex_model, "Codec checkpoint");
    extract->add_option("--alpha", ex_alpha, "Insertion factor");
    extract->add_option("--qbits", ex_qbits, "Feature quantizer bits");
    extract->add_option("--out", ex_out, "Reconstructed digit output (PGM)");

    // ---- metrics ----
    auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between two images");
    std::string me_ref, me_test;
    metrics->add_option("--ref", me_ref, "Reference image (.ppm or .pgm)")->required();
    metrics->add_option("--test", me_test, "Test image, same format")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train) {
            const auto digits = hbsc::load_or_make_digits(train_count, tc.seed, train_data_dir);
            const auto res = hbsc::train_autoencoder<float>(digits, tc);
            hbsc::save_model(train_out, res.model);
            for (size_t e = 0; e < res.epoch_loss.size(); ++e) {
                std::printf("epoch=%zu loss=%s\n", e + 1, hbsc::format_metric(res.epoch_loss[e]).c_str());
            }
            if (!train_loss_out.empty()) {
                std::string csv = "epoch,loss\n";
                for (size_t e = 0; e < res.epoch_loss.size(); ++e) {
                    csv += std::to_string(e + 1) + "," + hbsc::format_metric(res.epoch_loss[e]) + "\n";
                }
                hbsc::write_file(train_loss_out, std::vector<uint8_t>(csv.begin(), csv.end()));
            }
            std::printf("saved=%s\n", train_out.c_str());
            return 0;
        }

        if (*run) {
            hbsc::LinkConfig cfg;
            cfg.carrier = parse_carrier(run_carrier);
            cfg.digit = parse_digit(run_digit);
            hbsc::AutoEncoder<float> model;
            cfg.insertion = !run_no_insertion;
            if (cfg.insertion) {
                model = hbsc::load_model<float>(run_model);
                cfg.model = &model;
            }
            cfg.scheme = parse_scheme(run_scheme);
            cfg.channel = hbsc::channel_from_name(run_channel);
            cfg.snr_db = run_snr;
            cfg.embed.alpha = run_alpha;
            cfg.embed.q = run_qbits;
            cfg.embed.midpoint = !run_no_midpoint;
            cfg.jpeg_quality = run_quality;
            cfg.symbol_budget = parse_budget(run_budget);
            cfg.ofdm = run_ofdm;
            cfg.restart_interval = run_restart;
            cfg.seed = run_seed;

            const hbsc::TxState tx = hbsc::prepare_tx(cfg);
            hbsc::LinkArtifacts art;
            const hbsc::LinkResult r = hbsc::run_rx(cfg, tx, &art);
            print_result(r);
            if (!run_out_bit.empty()) hbsc::save_ppm_file(run_out_bit, art.bit_image);
            if (!run_out_sem.empty() && cfg.insertion) hbsc::save_pgm_file(run_out_sem, art.sem_image);
            return r.frame_status == "frame-error" ? 2 : 0;
        }

        if (*sweep) {
            const auto bytes = hbsc::read_file(sweep_config);
            const auto ini = hbsc::parse_ini(std::string(bytes.begin(), bytes.end()));
            hbsc::SweepConfig sc;
            sc.carrier = parse_carrier(hbsc::cfg_str(ini, "sweep.carrier", "synth:512x512:7"));
            sc.digit = parse_digit(hbsc::cfg_str(ini, "sweep.digit", "synth:3:7"));
            hbsc::AutoEncoder<float> model = hbsc::load_model<float>(hbsc::cfg_str(ini, "sweep.model", "model.bin"));
            sc.model = &model;
            sc.schemes.clear();
            for (const auto& s : hbsc::split_list(hbsc::cfg_str(ini, "sweep.schemes", "qpsk,16qam,64qam"))) {
                sc.schemes.push_back(parse_scheme(s));
            }
            sc.channels.clear();
            for (const auto& s : hbsc::split_list(hbsc::cfg_str(ini, "sweep.channels", "awgn,rayleigh"))) {
                sc.channels.push_back(hbsc::channel_from_name(s));
            }
            sc.snrs_db.clear();
            for (const auto& s : hbsc::split_list(hbsc::cfg_str(ini, "sweep.snrs_db", "0,2,4,6,8,10,12,14,16,18,20"))) {
                sc.snrs_db.push_back(std::stod(s));
            }
            sc.repeats = static_cast<int>(hbsc::cfg_long(ini, "sweep.repeats", 10));
            sc.seed = sweep_seed;
            sc.embed.alpha = hbsc::cfg_double(ini, "sweep.alpha", 14.0);
            sc.embed.q = static_cast<int>(hbsc::cfg_long(ini, "sweep.qbits", 4));
            sc.embed.midpoint = hbsc::cfg_bool(ini, "sweep.midpoint", true);
            sc.symbol_budget = parse_budget(hbsc::cfg_str(ini, "sweep.budget", "auto"));
            sc.ofdm = hbsc::cfg_bool(ini, "sweep.ofdm", false);
            sc.include_baseline = hbsc::cfg_bool(ini, "sweep.baseline", true);
            sc.jpeg_quality = static_cast<int>(hbsc::cfg_long(ini, "sweep.quality", 0));
            sc.restart_interval = static_cast<int>(hbsc::cfg_long(ini, "sweep.restart", 8));

            const hbsc::SweepOutput out = hbsc::run_sweep(sc);
            for (const auto& path : hbsc::write_sweep_outputs(sc, out, sweep_out_dir)) {
                std::printf("wrote=%s\n", path.c_str());
            }
            return 0;
        }

        if (*embed) {
            const hbsc::RgbImage carrier = hbsc::pad_replicate(parse_carrier(em_carrier), 8);
            const hbsc::GrayImage digit = parse_digit(em_digit);
            const auto model = hbsc::load_model<float>(em_model);
            hbsc::EmbedConfig ec{em_alpha, em_qbits, !em_no_midpoint};
            const hbsc::FeatureTensor feat = hbsc::encode_semantic(digit, model);
            const hbsc::QuantizedPayload payload = hbsc::quantize_features(feat, ec.q);
            const hbsc::RgbImage hybrid = hbsc::insert_payload(carrier, payload, ec);
            hbsc::save_ppm_file(em_out, hybrid);
            std::printf("payload_bits=%zu\n", payload.bits.size());
            std::printf("psnr_embed=%s\n", hbsc::format_metric(hbsc::psnr(carrier, hybrid)).c_str());
            std::printf("wrote=%s\n", em_out.c_str());
            return 0;
        }

        if (*extract) {
            const hbsc::RgbImage hybrid = hbsc::load_ppm_file(ex_image);
            const auto model = hbsc::load_model<float>(ex_model);
            hbsc::EmbedConfig ec{ex_alpha, ex_qbits, true};
            const size_t nbits = 28ull * 28ull * static_cast<size_t>(ex_qbits);
            const auto bits = hbsc::extract_payload_bits(hybrid, nbits, ec);
            hbsc::QuantizedPayload qp;
            qp.bits = bits;
            qp.feat_height = 28;
            qp.feat_width = 28;
            qp.feat_channels = 1;
            const hbsc::FeatureTensor feat = hbsc::dequantize_features(qp, ec.q);
            const hbsc::Plane sem = hbsc::decode_semantic(feat, model);
            hbsc::save_pgm_file(ex_out, hbsc::plane01_to_gray(sem));
            std::printf("wrote=%s\n", ex_out.c_str());
            return 0;
        }

        if (*metrics) {
            const bool gray = me_ref.size() > 4 && me_ref.substr(me_ref.size() - 4) == ".pgm";
            double p, s;
            if (gray) {
                const auto a = hbsc::load_pgm_file(me_ref);
                const auto b = hbsc::load_pgm_file(me_test);
                p = hbsc::psnr(a, b);
                s = hbsc::ssim(a, b);
            } else {
                const auto a = hbsc::load_ppm_file(me_ref);
                const auto b = hbsc::load_ppm_file(me_test);
                p = hbsc::psnr(a, b);
                s = hbsc::ssim(a, b);
            }
            std::printf("psnr=%s\nssim=%s\n", hbsc::format_metric(p).c_str(), hbsc::format_metric(s).c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
