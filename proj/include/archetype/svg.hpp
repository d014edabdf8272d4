#pragma once

#include <string>
#include <vector>

#include "archetype/geometry.hpp"

namespace arch::svg {

struct Style {
    std::string stroke = "black";
    double stroke_width = 1.0;
    std::string fill = "none";
};

/// Minimal SVG 1.1 line-plot writer. Data coordinates are mapped onto a
/// fixed-size canvas with margins; the x axis can be logarithmic. Every
/// curve and polygon outline is emitted as one <polyline> element.
class Figure {
public:
    Figure(double width, double height, std::string title = {});

    void set_log_x(bool log_x) { log_x_ = log_x; }
    void set_axis_labels(std::string x, std::string y);

    void add_curve(const std::vector<double>& x, const std::vector<double>& y,
                   const Style& style, const std::string& name = {});
    /// Closed outline: the first point is appended again at the end.
    void add_polygon(const std::vector<Vec2>& vertices, const Style& style,
                     const std::string& name = {});
    void add_scatter(const std::vector<Vec2>& pts, double radius,
                     const std::string& color);
    void add_marker(Vec2 p, double radius, const std::string& color);

    /// Lock axis ranges; otherwise they are fitted to the data.
    void set_ranges(double xmin, double xmax, double ymin, double ymax);
    /// Pad ranges so x and y use the same scale (for geometry plots).
    void set_equal_aspect(bool on) { equal_aspect_ = on; }

    std::string render() const;
    void write(const std::string& path) const;

private:
    struct Polyline {
        std::vector<double> x, y;
        Style style;
        std::string name;
    };
    struct Circle {
        Vec2 center;
        double radius;
        std::string color;
    };

    double width_, height_;
    std::string title_;
    std::string x_label_, y_label_;
    bool log_x_ = false;
    bool equal_aspect_ = false;
    bool fixed_ranges_ = false;
    double xmin_ = 0, xmax_ = 1, ymin_ = 0, ymax_ = 1;
    std::vector<Polyline> polylines_;
    std::vector<Circle> circles_;
};

std::string xml_escape(const std::string& s);

}  // namespace arch::svg
