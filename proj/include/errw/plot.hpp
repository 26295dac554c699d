// plot.hpp - self-contained SVG line plots on log-log axes, with the
// underlying data always written as CSV alongside. Output is built from
// deterministic string formatting only, so identical input reproduces the
// file byte for byte.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace errw {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (x, y), both positive for log axes
};

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_plot_csv(std::ostream& out, const std::vector<PlotSeries>& series) {
    out << "series,x,y\n";
    for (const auto& s : series)
        for (const auto& [x, y] : s.points)
            out << s.name << ',' << format_g17(x) << ',' << format_g17(y) << '\n';
}

// Minimal log-log line plot. Returns an empty string when there is nothing to
// draw (the CSV is still the caller's record).
inline std::string render_loglog_svg(const std::vector<PlotSeries>& series,
                                     const std::string& title, const std::string& xlabel,
                                     const std::string& ylabel) {
    bool any = false;
    for (const auto& s : series) any = any || !s.points.empty();
    if (!any) return {};

    double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0)) continue;
            lx_min = std::min(lx_min, std::log10(x));
            lx_max = std::max(lx_max, std::log10(x));
            ly_min = std::min(ly_min, std::log10(y));
            ly_max = std::max(ly_max, std::log10(y));
        }
    if (lx_min > lx_max || ly_min > ly_max) return {};
    if (lx_max - lx_min < 1e-9) { lx_min -= 0.5; lx_max += 0.5; }
    if (ly_max - ly_min < 1e-9) { ly_min -= 0.5; ly_max += 0.5; }

    const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 50;
    auto sx = [&](double lx) { return L + (lx - lx_min) / (lx_max - lx_min) * (W - L - R); };
    auto sy = [&](double ly) { return H - B - (ly - ly_min) / (ly_max - ly_min) * (H - T - B); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";
    svg += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + xlabel + "</text>\n";
    svg += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 240)\">" + ylabel + "</text>\n";
    svg += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) +
           "\" height=\"" + num(H - T - B) + "\" fill=\"none\" stroke=\"#333\"/>\n";

    // decade grid lines and tick labels
    for (int d = static_cast<int>(std::ceil(lx_min)); d <= static_cast<int>(std::floor(lx_max)); ++d) {
        const double x = sx(d);
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(T) + "\" x2=\"" + num(x) + "\" y2=\"" +
               num(H - B) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(H - B + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(d) + "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ly_min)); d <= static_cast<int>(std::floor(ly_max)); ++d) {
        const double y = sy(d);
        svg += "<line x1=\"" + num(L) + "\" y1=\"" + num(y) + "\" x2=\"" + num(W - R) + "\" y2=\"" +
               num(y) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + num(L - 6) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(d) + "</text>\n";
    }

    int color = 0;
    double legend_y = T + 16;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        const char* col = kColors[color % 6];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0)) continue;
            pts += num(sx(std::log10(x))) + "," + num(sy(std::log10(y))) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(col) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        svg += "<text x=\"" + num(W - R - 8) + "\" y=\"" + num(legend_y) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" +
               std::string(col) + "\">" + s.name + "</text>\n";
        legend_y += 14;
        ++color;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace errw
