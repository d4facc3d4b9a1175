#include "wmlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wmlab::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};

std::string header(int w, int h, const std::string& comment) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    if (!comment.empty()) out << "<!-- " << escape(comment) << " -->\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    return out.str();
}

void title_text(std::ostringstream& out, int width, const std::string& title) {
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
}

}  // namespace

std::string roc_chart(const std::string& title, const std::vector<RocPoint>& points,
                      const std::string& comment) {
    const int W = 420, H = 420;
    const double x0 = 60, y0 = 40, plot = 320;
    auto px = [&](double fpr) { return x0 + fpr * plot; };
    auto py = [&](double tpr) { return y0 + (1.0 - tpr) * plot; };

    std::ostringstream out;
    out << header(W, H, comment);
    title_text(out, W, title);
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(plot)
        << "\" height=\"" << num(plot) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(1))
        << "\" y2=\"" << num(py(1)) << "\" stroke=\"#bbb\" stroke-dasharray=\"4,4\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[0] << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : points) out << num(px(p.fpr)) << "," << num(py(p.tpr)) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << num(x0 + plot / 2) << "\" y=\"" << num(y0 + plot + 32)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">false positive rate</text>\n";
    out << "<text x=\"16\" y=\"" << num(y0 + plot / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << num(y0 + plot / 2) << ")\">true positive rate</text>\n";
    for (int t = 0; t <= 4; ++t) {
        double f = t / 4.0;
        out << "<text x=\"" << num(px(f)) << "\" y=\"" << num(y0 + plot + 14)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(f)
            << "</text>\n";
        out << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py(f) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(f)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& series,
                      const std::vector<BarGroup>& groups, const std::string& comment) {
    const int W = std::max<int>(420, 80 + 90 * static_cast<int>(groups.size()));
    const int H = 360;
    const double x0 = 60, y0 = 40, plot_h = 240;
    double max_v = 1e-9;
    for (const auto& g : groups)
        for (double v : g.values) max_v = std::max(max_v, v);

    std::ostringstream out;
    out << header(W, H, comment);
    title_text(out, W, title);
    double group_w = (W - x0 - 20) / std::max<std::size_t>(groups.size(), 1);
    double bar_w = group_w * 0.8 / std::max<std::size_t>(series.size(), 1);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        double gx = x0 + static_cast<double>(gi) * group_w + group_w * 0.1;
        for (std::size_t si = 0; si < g.values.size(); ++si) {
            double h = g.values[si] / max_v * plot_h;
            out << "<rect x=\"" << num(gx + static_cast<double>(si) * bar_w) << "\" y=\""
                << num(y0 + plot_h - h) << "\" width=\"" << num(bar_w * 0.92) << "\" height=\""
                << num(h) << "\" fill=\"" << kPalette[si % 6] << "\"/>\n";
        }
        out << "<text x=\"" << num(gx + group_w * 0.4) << "\" y=\"" << num(y0 + plot_h + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << escape(g.label) << "</text>\n";
    }
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0 + plot_h) << "\" x2=\""
        << num(static_cast<double>(W) - 20) << "\" y2=\"" << num(y0 + plot_h)
        << "\" stroke=\"#333\"/>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        double ly = y0 + plot_h + 36 + static_cast<double>(si / 4) * 16;
        double lx = x0 + static_cast<double>(si % 4) * 110;
        out << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
            << kPalette[si % 6] << "\"/>\n";
        out << "<text x=\"" << num(lx + 14) << "\" y=\"" << num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series[si]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values, const std::string& comment) {
    const double cell = 26.0, left = 170.0, top = 60.0;
    const int W = static_cast<int>(left + cell * static_cast<double>(col_labels.size()) + 80);
    const int H = static_cast<int>(top + cell * static_cast<double>(row_labels.size()) + 40);

    auto color = [](double v) {
        // blue (-1) .. white (0) .. red (+1)
        double clamped = std::max(-1.0, std::min(1.0, v));
        int r, g, b;
        if (clamped >= 0) {
            r = 255;
            g = b = static_cast<int>(std::lround(255 * (1.0 - clamped)));
        } else {
            b = 255;
            r = g = static_cast<int>(std::lround(255 * (1.0 + clamped)));
        }
        char buf[8];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::ostringstream out;
    out << header(W, H, comment);
    title_text(out, W, title);
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
        out << "<text x=\"" << num(left + cell * (static_cast<double>(c) + 0.5)) << "\" y=\""
            << num(top - 8) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << escape(col_labels[c]) << "</text>\n";
    }
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        double y = top + cell * static_cast<double>(r);
        out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + cell * 0.65)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << escape(row_labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < col_labels.size(); ++c) {
            double x = left + cell * static_cast<double>(c);
            double v = values[r][c];
            if (std::isnan(v)) {
                out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell)
                    << "\" height=\"" << num(cell) << "\" fill=\"none\" stroke=\"#999\"/>\n";
                continue;
            }
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell)
                << "\" height=\"" << num(cell) << "\" fill=\"" << color(v)
                << "\" stroke=\"#ccc\"/>\n";
            out << "<text x=\"" << num(x + cell / 2) << "\" y=\"" << num(y + cell * 0.65)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"8\">"
                << num(v) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace wmlab::svg
