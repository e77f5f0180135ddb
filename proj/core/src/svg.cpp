#include "netsirs/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace netsirs {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 48;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#17becf", "#7f7f7f"};

void put_fixed(std::ostream& out, double v, int precision = 2) {
    char buf[48];
    auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed,
                      precision);
    out.write(buf, ptr - buf);
}

void put_general(std::ostream& out, double v) {
    char buf[48];
    auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    out.write(buf, ptr - buf);
}

} // namespace

void write_line_plot(std::ostream& out, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto sx = [&](double x) {
        return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w;
    };
    auto sy = [&](double y) {
        return kMarginTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h;
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";

    // Axes with 5 ticks each.
    out << "<g stroke=\"#333\" stroke-width=\"1\" font-family=\"sans-serif\" "
           "font-size=\"10\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        const double px = sx(xv);
        const double py = sy(yv);
        out << "<line x1=\"";
        put_fixed(out, px);
        out << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\"";
        put_fixed(out, px);
        out << "\" y2=\"" << kHeight - kMarginBottom + 4 << "\"/>\n";
        out << "<text x=\"";
        put_fixed(out, px);
        out << "\" y=\"" << kHeight - kMarginBottom + 16
            << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">";
        put_general(out, xv);
        out << "</text>\n";
        out << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"";
        put_fixed(out, py);
        out << "\" x2=\"" << kMarginLeft << "\" y2=\"";
        put_fixed(out, py);
        out << "\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"";
        put_fixed(out, py + 3);
        out << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">";
        put_general(out, yv);
        out << "</text>\n";
    }
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop
        << "\" x2=\"" << kMarginLeft << "\" y2=\""
        << kHeight - kMarginBottom << "\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\""
        << kHeight - kMarginBottom << "\" x2=\"" << kWidth - kMarginRight
        << "\" y2=\"" << kHeight - kMarginBottom << "\"/>\n";
    out << "</g>\n";

    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 "
        << kHeight / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[s].points) {
            put_fixed(out, sx(x));
            out << ',';
            put_fixed(out, sy(y));
            out << ' ';
        }
        out << "\"/>\n";
        // Legend entry.
        const int ly = kMarginTop + 14 * static_cast<int>(s);
        out << "<line x1=\"" << kWidth - kMarginRight - 150 << "\" y1=\"" << ly
            << "\" x2=\"" << kWidth - kMarginRight - 130 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kWidth - kMarginRight - 126 << "\" y=\""
            << ly + 3
            << "\" font-family=\"sans-serif\" font-size=\"10\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace netsirs
