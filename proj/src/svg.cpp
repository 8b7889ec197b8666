#include "ebgan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ebgan {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string gnum(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double p = 0.05 * (hi - lo);
            lo -= p;
            hi += p;
        }
    }
};

struct Mapper {
    Range xr, yr;
    double px(double x) const {
        return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) *
                                 (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kHeight - kMarginBottom - (y - yr.lo) / (yr.hi - yr.lo) *
                                             (kHeight - kMarginTop - kMarginBottom);
    }
};

void open_svg(std::string& out) {
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\">\n";
    out += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
}

void draw_frame(std::string& out, const Mapper& m, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) +
           "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) +
           "\" y2=\"" + num(y1) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = m.xr.lo + (m.xr.hi - m.xr.lo) * i / 5.0;
        const double fy = m.yr.lo + (m.yr.hi - m.yr.lo) * i / 5.0;
        const double tx = m.px(fx);
        const double ty = m.py(fy);
        out += "<line x1=\"" + num(tx) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(tx) +
               "\" y2=\"" + num(y0 + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(tx) + "\" y=\"" + num(y0 + 20) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + gnum(fx) + "</text>\n";
        out += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(ty) + "\" x2=\"" +
               num(x0) + "\" y2=\"" + num(ty) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(ty + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + gnum(fy) + "</text>\n";
    }
    out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(y0 + 38) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + num((y0 + y1) / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((y0 + y1) / 2) + ")\">" + y_label + "</text>\n";
    out += "<text x=\"" + num(kWidth / 2.0) +
           "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" + title +
           "</text>\n";
}

}  // namespace

std::string render_line_chart(const std::vector<Series>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<double>& h_lines) {
    if (series.empty()) throw std::invalid_argument("render_line_chart: no series");
    Range xr, yr;
    bool first = true;
    for (const Series& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) {
            throw std::invalid_argument("render_line_chart: bad series '" + s.label + "'");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xr.lo = xr.hi = s.x[i];
                yr.lo = yr.hi = s.y[i];
                first = false;
            }
            xr.include(s.x[i]);
            yr.include(s.y[i]);
        }
    }
    for (double h : h_lines) yr.include(h);
    xr.pad();
    yr.pad();
    Mapper m{xr, yr};

    std::string out;
    open_svg(out);
    draw_frame(out, m, title, x_label, y_label);
    for (double h : h_lines) {
        out += "<line x1=\"" + num(m.px(xr.lo)) + "\" y1=\"" + num(m.py(h)) +
               "\" x2=\"" + num(m.px(xr.hi)) + "\" y2=\"" + num(m.py(h)) +
               "\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kPalette[si % 10];
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out += ' ';
            out += num(m.px(s.x[i])) + "," + num(m.py(s.y[i]));
        }
        out += "\"/>\n";
        const double ly = kMarginTop + 16.0 * static_cast<double>(si);
        out += "<line x1=\"" + num(kWidth - 170.0) + "\" y1=\"" + num(ly) + "\" x2=\"" +
               num(kWidth - 150.0) + "\" y2=\"" + num(ly) + "\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(kWidth - 144.0) + "\" y=\"" + num(ly + 4) +
               "\" font-size=\"12\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string render_scatter(const std::vector<ScatterPoint>& points,
                           const std::vector<std::string>& class_labels,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
    if (points.empty()) throw std::invalid_argument("render_scatter: no points");
    Range xr, yr;
    xr.lo = xr.hi = points[0].x;
    yr.lo = yr.hi = points[0].y;
    for (const ScatterPoint& p : points) {
        xr.include(p.x);
        yr.include(p.y);
    }
    xr.pad();
    yr.pad();
    Mapper m{xr, yr};

    std::string out;
    open_svg(out);
    draw_frame(out, m, title, x_label, y_label);
    for (const ScatterPoint& p : points) {
        out += "<circle cx=\"" + num(m.px(p.x)) + "\" cy=\"" + num(m.py(p.y)) +
               "\" r=\"2\" fill-opacity=\"0.5\" fill=\"";
        out += kPalette[p.class_index % 10];
        out += "\"/>\n";
    }
    // Legend swatches are rects so circle elements map 1:1 to data points.
    for (std::size_t c = 0; c < class_labels.size(); ++c) {
        const double ly = kMarginTop + 16.0 * static_cast<double>(c);
        out += "<rect x=\"" + num(kWidth - 168.0) + "\" y=\"" + num(ly - 4) +
               "\" width=\"8\" height=\"8\" fill=\"";
        out += kPalette[c % 10];
        out += "\"/>\n";
        out += "<text x=\"" + num(kWidth - 152.0) + "\" y=\"" + num(ly + 4) +
               "\" font-size=\"12\">" + class_labels[c] + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write_text_file: write failed for " + path.string());
}

}  // namespace ebgan
