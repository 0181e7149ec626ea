#include "lrb/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lrb {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string render_loglog_svg(const std::vector<PlotSeries>& series,
                              const std::string& title) {
    const double width = 720, height = 480;
    const double left = 70, right = 30, top = 50, bottom = 60;

    std::vector<PlotSeries> usable;
    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (const PlotSeries& s : series) {
        PlotSeries kept;
        kept.label = s.label;
        for (const auto& [x, y] : s.points) {
            if (x <= 0.0 || y <= 0.0) continue;
            kept.points.emplace_back(std::log10(x), std::log10(y));
            xmin = std::min(xmin, kept.points.back().first);
            xmax = std::max(xmax, kept.points.back().first);
            ymin = std::min(ymin, kept.points.back().second);
            ymax = std::max(ymax, kept.points.back().second);
        }
        if (!kept.points.empty()) usable.push_back(std::move(kept));
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    if (usable.empty()) {
        svg << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"14\">no positive data to plot</text>\n</svg>\n";
        return svg.str();
    }

    if (xmax - xmin < 1e-9) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-9) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    xmin = std::floor(xmin * 2) / 2;
    xmax = std::ceil(xmax * 2) / 2;
    ymin = std::floor(ymin * 2) / 2;
    ymax = std::ceil(ymax * 2) / 2;

    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto sx = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * plot_h; };

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (double lx = std::ceil(xmin); lx <= xmax + 1e-9; lx += 1.0) {
        const double px = sx(lx);
        svg << "<line x1=\"" << num(px) << "\" y1=\"" << top << "\" x2=\""
            << num(px) << "\" y2=\"" << top + plot_h
            << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << num(px) << "\" y=\"" << top + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"12\">1e" << static_cast<int>(lx) << "</text>\n";
    }
    for (double ly = std::ceil(ymin); ly <= ymax + 1e-9; ly += 1.0) {
        const double py = sy(ly);
        svg << "<line x1=\"" << left << "\" y1=\"" << num(py) << "\" x2=\""
            << left + plot_w << "\" y2=\"" << num(py)
            << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
            << "font-size=\"12\">1e" << static_cast<int>(ly) << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\">rounds n</text>\n";
    svg << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << top + plot_h / 2
        << ")\">mean simple regret</text>\n";

    for (std::size_t i = 0; i < usable.size(); ++i) {
        const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
        std::ostringstream path;
        for (std::size_t k = 0; k < usable[i].points.size(); ++k) {
            path << (k == 0 ? "M" : "L") << num(sx(usable[i].points[k].first))
                 << " " << num(sy(usable[i].points[k].second)) << " ";
        }
        svg << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        for (const auto& [lx, ly] : usable[i].points)
            svg << "<circle cx=\"" << num(sx(lx)) << "\" cy=\"" << num(sy(ly))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double legend_y = top + 16 + 18 * static_cast<double>(i);
        svg << "<rect x=\"" << left + plot_w - 190 << "\" y=\"" << legend_y - 10
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << left + plot_w - 172 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << usable[i].label
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace lrb
