#pragma once

#include <cstddef>
#include <vector>

#include "archetype/matrix.hpp"

namespace arch {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Unordered collection of k points in ℝᵈ (one inner vector per point).
using PointSet = std::vector<std::vector<double>>;

/// Convex polygon: vertices in counter-clockwise order with collinear
/// points removed. Degenerate hulls (all input points equal or collinear)
/// carry one or two vertices.
struct Polygon2D {
    std::vector<Vec2> vertices;
};

// Indices of hull vertices in CCW order (Andrew monotone chain). Shared by
// the hull builder and the solver's extreme-point preprocessing.
std::vector<std::size_t> convex_hull_indices(const std::vector<Vec2>& pts);

Polygon2D convex_hull_2d(const std::vector<Vec2>& pts);
Polygon2D convex_hull_2d(const PointSet& pts);

/// min over permutations σ of max_ℓ ‖a_{σ(ℓ)} − b_ℓ‖₂. Exhaustive search up
/// to k = 8, bottleneck assignment for 8 < k ≤ 64.
double d2_infty(const PointSet& a, const PointSet& b);

/// max of the two directed sup-inf distances.
double hausdorff(const PointSet& a, const PointSet& b);

/// 0 if x lies in the closed polygon, else distance to the boundary.
double dist_to_hull(Vec2 x, const Polygon2D& poly);

/// One interior angle per vertex, degrees, each in (0, 180).
std::vector<double> interior_angles(const Polygon2D& poly);

/// Shoelace area; 0 for degenerate polygons with fewer than 3 vertices.
double polygon_area(const Polygon2D& poly);

/// Closed-polygon membership; points within 1e-10 of an edge count as inside.
bool contains(const Polygon2D& poly, Vec2 x);

// Column j of a d×k matrix viewed as a point; d == 2 helpers.
PointSet columns_as_points(const Matrix& m);
std::vector<Vec2> columns_as_vec2(const Matrix& m);

}  // namespace arch
