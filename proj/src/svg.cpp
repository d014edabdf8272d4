#include "archetype/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace arch::svg {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

constexpr double kMargin = 56.0;

}  // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

Figure::Figure(double width, double height, std::string title)
    : width_(width), height_(height), title_(std::move(title)) {}

void Figure::set_axis_labels(std::string x, std::string y) {
    x_label_ = std::move(x);
    y_label_ = std::move(y);
}

void Figure::add_curve(const std::vector<double>& x, const std::vector<double>& y,
                       const Style& style, const std::string& name) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("Figure::add_curve: x/y length mismatch");
    }
    polylines_.push_back({x, y, style, name});
}

void Figure::add_polygon(const std::vector<Vec2>& v, const Style& style,
                         const std::string& name) {
    std::vector<double> x, y;
    x.reserve(v.size() + 1);
    y.reserve(v.size() + 1);
    for (const Vec2& p : v) {
        x.push_back(p.x);
        y.push_back(p.y);
    }
    if (!v.empty()) {
        x.push_back(v.front().x);
        y.push_back(v.front().y);
    }
    polylines_.push_back({std::move(x), std::move(y), style, name});
}

void Figure::add_scatter(const std::vector<Vec2>& pts, double radius,
                         const std::string& color) {
    for (const Vec2& p : pts) circles_.push_back({p, radius, color});
}

void Figure::add_marker(Vec2 p, double radius, const std::string& color) {
    circles_.push_back({p, radius, color});
}

void Figure::set_ranges(double xmin, double xmax, double ymin, double ymax) {
    xmin_ = xmin;
    xmax_ = xmax;
    ymin_ = ymin;
    ymax_ = ymax;
    fixed_ranges_ = true;
}

std::string Figure::render() const {
    double xmin = xmin_, xmax = xmax_, ymin = ymin_, ymax = ymax_;
    if (!fixed_ranges_) {
        xmin = ymin = std::numeric_limits<double>::infinity();
        xmax = ymax = -std::numeric_limits<double>::infinity();
        const auto eat = [&](double x, double y) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        };
        for (const Polyline& pl : polylines_) {
            for (std::size_t i = 0; i < pl.x.size(); ++i) eat(pl.x[i], pl.y[i]);
        }
        for (const Circle& c : circles_) eat(c.center.x, c.center.y);
        if (!(xmin <= xmax)) {
            xmin = 0;
            xmax = 1;
            ymin = 0;
            ymax = 1;
        }
        if (xmin == xmax) {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if (ymin == ymax) {
            ymin -= 0.5;
            ymax += 0.5;
        }
        const double padx = 0.05 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
        xmin -= padx;
        xmax += padx;
        ymin -= pady;
        ymax += pady;
    }

    const double plot_w = width_ - 2 * kMargin, plot_h = height_ - 2 * kMargin;
    double tx_min = log_x_ ? std::log10(std::max(xmin, 1e-12)) : xmin;
    double tx_max = log_x_ ? std::log10(std::max(xmax, 1e-12)) : xmax;
    double sx = plot_w / (tx_max - tx_min);
    double sy = plot_h / (ymax - ymin);
    if (equal_aspect_ && !log_x_) {
        const double s = std::min(sx, sy);
        sx = sy = s;
    }
    const double cx = kMargin + plot_w / 2.0, cy = kMargin + plot_h / 2.0;
    const double mx = (tx_min + tx_max) / 2.0, my = (ymin + ymax) / 2.0;
    const auto px = [&](double x) {
        const double t = log_x_ ? std::log10(std::max(x, 1e-12)) : x;
        return cx + (t - mx) * sx;
    };
    const auto py = [&](double y) { return cy - (y - my) * sy; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << num(width_) << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 "
        << num(width_) << " " << num(height_) << "\">\n";
    out << "  <rect width=\"" << num(width_) << "\" height=\"" << num(height_)
        << "\" fill=\"white\"/>\n";
    if (!title_.empty()) {
        out << "  <text x=\"" << num(width_ / 2) << "\" y=\"24\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"15\">"
            << xml_escape(title_) << "</text>\n";
    }
    // axes frame
    out << "  <rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
        << num(plot_w) << "\" height=\"" << num(plot_h)
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    if (!x_label_.empty()) {
        out << "  <text x=\"" << num(width_ / 2) << "\" y=\"" << num(height_ - 12)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(x_label_) << "</text>\n";
    }
    if (!y_label_.empty()) {
        out << "  <text x=\"16\" y=\"" << num(height_ / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "transform=\"rotate(-90 16 "
            << num(height_ / 2) << ")\">" << xml_escape(y_label_) << "</text>\n";
    }
    // tick labels at the corners of the data range
    out << "  <text x=\"" << num(kMargin) << "\" y=\"" << num(height_ - kMargin + 16)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << num(xmin) << "</text>\n";
    out << "  <text x=\"" << num(width_ - kMargin) << "\" y=\""
        << num(height_ - kMargin + 16)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << num(xmax) << "</text>\n";
    out << "  <text x=\"" << num(kMargin - 4) << "\" y=\"" << num(height_ - kMargin)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << num(ymin) << "</text>\n";
    out << "  <text x=\"" << num(kMargin - 4) << "\" y=\"" << num(kMargin + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << num(ymax) << "</text>\n";

    for (const Circle& c : circles_) {
        out << "  <circle cx=\"" << num(px(c.center.x)) << "\" cy=\"" << num(py(c.center.y))
            << "\" r=\"" << num(c.radius) << "\" fill=\"" << c.color << "\"/>\n";
    }
    for (const Polyline& pl : polylines_) {
        out << "  <polyline";
        if (!pl.name.empty()) out << " id=\"" << xml_escape(pl.name) << "\"";
        out << " fill=\"" << pl.style.fill << "\" stroke=\"" << pl.style.stroke
            << "\" stroke-width=\"" << num(pl.style.stroke_width) << "\" points=\"";
        for (std::size_t i = 0; i < pl.x.size(); ++i) {
            if (i) out << ' ';
            out << num(px(pl.x[i])) << ',' << num(py(pl.y[i]));
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void Figure::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("Figure::write: cannot open '" + path + "'");
    out << render();
}

}  // namespace arch::svg
