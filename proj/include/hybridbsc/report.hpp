// Sweep reporting: a CSV table (fixed column order, resolved configuration
// echoed as leading comment lines) and self-contained SVG line plots. All
// formatting is locale-independent and deterministic so identical sweeps
// serialize to identical bytes.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hybridbsc/image.hpp"
#include "hybridbsc/link.hpp"

namespace hbsc {

inline std::string format_metric(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

namespace detail {

inline std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_metric(v[i]);
    }
    return s;
}

}  // namespace detail

inline std::string sweep_csv(const SweepConfig& sc, const SweepOutput& out) {
    std::string s;
    s += "# hybridbsc sweep\n";
    s += "# carrier=" + std::to_string(sc.carrier.width) + "x" + std::to_string(sc.carrier.height) + "\n";
    s += "# digit=" + std::to_string(sc.digit.width) + "x" + std::to_string(sc.digit.height) + "\n";
    std::string schemes;
    for (size_t i = 0; i < sc.schemes.size(); ++i) {
        if (i) schemes += ',';
        schemes += scheme_name(sc.schemes[i]);
    }
    s += "# schemes=" + schemes + "\n";
    std::string channels;
    for (size_t i = 0; i < sc.channels.size(); ++i) {
        if (i) channels += ',';
        channels += channel_name(sc.channels[i]);
    }
    s += "# channels=" + channels + "\n";
    s += "# snrs_db=" + detail::join_doubles(sc.snrs_db) + "\n";
    s += "# repeats=" + std::to_string(sc.repeats) + "\n";
    s += "# seed=" + std::to_string(sc.seed) + "\n";
    s += "# alpha=" + format_metric(sc.embed.alpha) + "\n";
    s += "# qbits=" + std::to_string(sc.embed.q) + "\n";
    s += "# midpoint=" + std::to_string(sc.embed.midpoint ? 1 : 0) + "\n";
    s += "# symbol_budget=" + std::to_string(sc.symbol_budget) + "\n";
    s += "# ofdm=" + std::to_string(sc.ofdm ? 1 : 0) + "\n";
    s += "# include_baseline=" + std::to_string(sc.include_baseline ? 1 : 0) + "\n";
    s += "# jpeg_quality=" + std::to_string(sc.jpeg_quality) + "\n";
    s += "# restart_interval=" + std::to_string(sc.restart_interval) + "\n";
    s += "scheme,channel,snr_db,psnr_bit,ssim_bit,psnr_sem,ssim_sem,payload_ber,quality,frame_status\n";
    for (const auto& row : out.rows) {
        s += row.scheme_label + "," + row.channel + "," + format_metric(row.snr_db) + "," +
             format_metric(row.mean.psnr_bit) + "," + format_metric(row.mean.ssim_bit) + "," +
             format_metric(row.mean.psnr_sem) + "," + format_metric(row.mean.ssim_sem) + "," +
             format_metric(row.mean.payload_ber) + "," + std::to_string(row.mean.jpeg_quality_used) + "," +
             row.mean.frame_status + "\n";
    }
    return s;
}

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> pts;
};

inline std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                                 const std::string& ylabel, const std::vector<PlotSeries>& series) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                     "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22",
                                     "#aec7e8", "#98df8a"};
    const double w = 720, h = 480, ml = 62, mr = 170, mt = 40, mb = 48;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& sr : series) {
        for (const auto& [x, y] : sr.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = y;
                any = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    const double pad = std::max(0.05 * (ymax - ymin), 1e-3);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt2(w) + "\" height=\"" +
         detail::fmt2(h) + "\" viewBox=\"0 0 " + detail::fmt2(w) + " " + detail::fmt2(h) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + detail::fmt2(ml) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" +
         title + "</text>\n";
    // axes
    s += "<line x1=\"" + detail::fmt2(ml) + "\" y1=\"" + detail::fmt2(h - mb) + "\" x2=\"" +
         detail::fmt2(w - mr) + "\" y2=\"" + detail::fmt2(h - mb) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + detail::fmt2(ml) + "\" y1=\"" + detail::fmt2(mt) + "\" x2=\"" + detail::fmt2(ml) +
         "\" y2=\"" + detail::fmt2(h - mb) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {  // y grid and ticks
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        const double yy = py(yv);
        s += "<line x1=\"" + detail::fmt2(ml) + "\" y1=\"" + detail::fmt2(yy) + "\" x2=\"" +
             detail::fmt2(w - mr) + "\" y2=\"" + detail::fmt2(yy) + "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + detail::fmt2(ml - 8) + "\" y=\"" + detail::fmt2(yy + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + detail::fmt2(yv) +
             "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {  // x ticks
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double xx = px(xv);
        s += "<line x1=\"" + detail::fmt2(xx) + "\" y1=\"" + detail::fmt2(h - mb) + "\" x2=\"" +
             detail::fmt2(xx) + "\" y2=\"" + detail::fmt2(h - mb + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + detail::fmt2(xx) + "\" y=\"" + detail::fmt2(h - mb + 18) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + detail::fmt2(xv) +
             "</text>\n";
    }
    s += "<text x=\"" + detail::fmt2((ml + w - mr) / 2) + "\" y=\"" + detail::fmt2(h - 10) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" + xlabel + "</text>\n";
    s += "<text x=\"16\" y=\"" + detail::fmt2((mt + h - mb) / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::fmt2((mt + h - mb) / 2) + ")\">" + ylabel + "</text>\n";

    size_t ci = 0;
    double ly = mt + 8;
    for (const auto& sr : series) {
        const std::string color = kPalette[ci % (sizeof kPalette / sizeof kPalette[0])];
        ++ci;
        std::string pts;
        for (const auto& [x, y] : sr.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (!pts.empty()) pts += ' ';
            pts += detail::fmt2(px(x)) + "," + detail::fmt2(py(y));
        }
        if (!pts.empty()) {
            s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
                 "\" stroke-width=\"1.8\"/>\n";
        }
        s += "<line x1=\"" + detail::fmt2(w - mr + 10) + "\" y1=\"" + detail::fmt2(ly) + "\" x2=\"" +
             detail::fmt2(w - mr + 34) + "\" y2=\"" + detail::fmt2(ly) + "\" stroke=\"" + color +
             "\" stroke-width=\"1.8\"/>\n";
        s += "<text x=\"" + detail::fmt2(w - mr + 40) + "\" y=\"" + detail::fmt2(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + sr.label + "</text>\n";
        ly += 18;
    }
    s += "</svg>\n";
    return s;
}

// Writes sweep.csv plus one PSNR and one SSIM plot per channel into `dir`.
inline std::vector<std::string> write_sweep_outputs(const SweepConfig& sc, const SweepOutput& out,
                                                    const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    const auto csv_path = (std::filesystem::path(dir) / "sweep.csv").string();
    const std::string csv = sweep_csv(sc, out);
    write_file(csv_path, std::vector<uint8_t>(csv.begin(), csv.end()));
    written.push_back(csv_path);

    for (const ChannelKind ch : sc.channels) {
        const std::string chname = channel_name(ch);
        for (const bool is_psnr : {true, false}) {
            std::vector<PlotSeries> series;
            // Ordered: per scheme label, bit curve then (if present) sem curve.
            std::vector<std::string> labels;
            for (const auto& row : out.rows) {
                if (row.channel != chname) continue;
                bool seen = false;
                for (const auto& l : labels) seen = seen || l == row.scheme_label;
                if (!seen) labels.push_back(row.scheme_label);
            }
            for (const auto& label : labels) {
                PlotSeries bit{label + "-bit", {}}, sem{label + "-sem", {}};
                for (const auto& row : out.rows) {
                    if (row.channel != chname || row.scheme_label != label) continue;
                    bit.pts.emplace_back(row.snr_db, is_psnr ? row.mean.psnr_bit : row.mean.ssim_bit);
                    sem.pts.emplace_back(row.snr_db, is_psnr ? row.mean.psnr_sem : row.mean.ssim_sem);
                }
                series.push_back(std::move(bit));
                bool sem_has_data = false;
                for (const auto& [x, y] : sem.pts) sem_has_data = sem_has_data || std::isfinite(y);
                if (sem_has_data) series.push_back(std::move(sem));
            }
            const std::string metric = is_psnr ? "psnr" : "ssim";
            const std::string path =
                (std::filesystem::path(dir) / ("plot_" + metric + "_" + chname + ".svg")).string();
            const std::string svg =
                line_plot_svg(metric + " vs SNR (" + chname + ")", "SNR (dB)", metric, series);
            write_file(path, std::vector<uint8_t>(svg.begin(), svg.end()));
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace hbsc
