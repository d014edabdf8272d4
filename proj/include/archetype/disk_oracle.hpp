#pragma once

#include <vector>

#include "archetype/geometry.hpp"

namespace arch::disk {

/// Mean squared distance (normalized by the disk area) from a unit-disk
/// sector of opening angle α to the inscribed triangle spanning it:
///   I(α) = (1/2π)(α/4 − (13/12)·sin α + α·cos²(α/2) − (1/3)·sin(α/2)·cos³(α/2)).
/// Defined for α ∈ [0, π], with I(0) = 0 and I(π) = 1/8.
double sector_integral(double alpha);

/// Squared objective value k·I(2π/k) attained by the vertices of a regular
/// k-gon inscribed in the unit disk; strictly decreasing in k. Requires k ≥ 3.
double optimal_objective_sq(int k);

/// Vertices (cos(rotation + 2πj/k), sin(rotation + 2πj/k)), j = 0..k−1.
std::vector<Vec2> regular_polygon(int k, double rotation);

/// The disk minimizers are unique only modulo rotation, so comparisons
/// against fitted points minimize d₂,∞ over the rotation: coarse grid of
/// 1e-3 rad on one period, then golden-section refinement.
double best_rotation_d2inf(const std::vector<Vec2>& pts, int k);

}  // namespace arch::disk
