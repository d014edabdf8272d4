#include "archetype/disk_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace arch::disk {

namespace {

constexpr double kPi = 3.14159265358979323846;

PointSet as_pointset(const std::vector<Vec2>& v) {
    PointSet s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = {v[i].x, v[i].y};
    return s;
}

double rotated_d2inf(const PointSet& pts, int k, double rot) {
    return d2_infty(pts, as_pointset(regular_polygon(k, rot)));
}

}  // namespace

double sector_integral(double alpha) {
    if (!(alpha >= 0.0 && alpha <= kPi)) {
        throw std::invalid_argument("sector_integral: alpha outside [0, pi]");
    }
    const double half = 0.5 * alpha;
    const double c = std::cos(half);
    return (alpha / 4.0 - (13.0 / 12.0) * std::sin(alpha) + alpha * c * c -
            (1.0 / 3.0) * std::sin(half) * c * c * c) /
           (2.0 * kPi);
}

double optimal_objective_sq(int k) {
    if (k < 3) {
        throw std::invalid_argument("optimal_objective_sq: k must be at least 3, got " +
                                    std::to_string(k));
    }
    return double(k) * sector_integral(2.0 * kPi / double(k));
}

std::vector<Vec2> regular_polygon(int k, double rotation) {
    if (k < 3) {
        throw std::invalid_argument("regular_polygon: k must be at least 3, got " +
                                    std::to_string(k));
    }
    std::vector<Vec2> v(k);
    for (int j = 0; j < k; ++j) {
        const double a = rotation + 2.0 * kPi * double(j) / double(k);
        v[j] = {std::cos(a), std::sin(a)};
    }
    return v;
}

double best_rotation_d2inf(const std::vector<Vec2>& pts, int k) {
    if (int(pts.size()) != k) {
        throw std::invalid_argument("best_rotation_d2inf: point count differs from k");
    }
    const PointSet target = as_pointset(pts);
    const double period = 2.0 * kPi / double(k);

    const double grid_step = 1e-3;
    double best_rot = 0.0;
    double best = rotated_d2inf(target, k, 0.0);
    for (double rot = grid_step; rot < period; rot += grid_step) {
        const double d = rotated_d2inf(target, k, rot);
        if (d < best) {
            best = d;
            best_rot = rot;
        }
    }

    // Golden-section refinement on the bracketing grid interval.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_rot - grid_step, hi = best_rot + grid_step;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = rotated_d2inf(target, k, x1), f2 = rotated_d2inf(target, k, x2);
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = rotated_d2inf(target, k, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = rotated_d2inf(target, k, x2);
        }
    }
    return std::min(best, std::min(f1, f2));
}

}  // namespace arch::disk
