#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "archetype/geometry.hpp"
#include "archetype/matrix.hpp"

namespace arch::verify {

// --- Independent oracles -------------------------------------------------
// Each one reaches the same quantity as a library routine by a different
// route, and none of them calls the routine it is used to check.

/// Exact simplex projection by KKT enumeration over all support sets
/// (2^q − 1 candidates, so q must stay small).
std::vector<double> enumerate_simplex_projection(const std::vector<double>& v);

/// Fixed-step classic Runge–Kutta integration of dω/dt = CᵀU − CᵀCω.
std::vector<double> rk4_flow(const Matrix& c, const std::vector<double>& u,
                             std::vector<double> w0, double t, double step);

/// Brute-force minimum of ‖u − Cω‖² over a simplex lattice with
/// `divisions` steps per coordinate, then pairwise-exchange refinement down
/// to steps of 1e-9. For a convex objective the exchanges reach the optimum.
double grid_refine_cls_objective(const Matrix& c, const std::vector<double>& u,
                                 int divisions = 10);

/// Adaptive-Simpson evaluation of the sector integral in the polar
/// parameterization (the radial integral is a cubic done in closed form).
double quadrature_sector_integral(double alpha, double tol = 1e-10);

/// Gift-wrapping (Jarvis march) hull indices, CCW.
std::vector<std::size_t> gift_wrap_hull(const std::vector<Vec2>& pts);

// --- Verification items ---------------------------------------------------

struct Item {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Report {
    std::vector<Item> items;
    bool all_pass() const;
};

using ScalarFn = std::function<double(double)>;
using ProjectionFn = std::function<std::vector<double>(const std::vector<double>&)>;

Item check_simplex_projection(std::uint64_t seed, int count,
                              const ProjectionFn& fn = {});
Item check_cls_objective(std::uint64_t seed, int count);
Item check_ode_flow(std::uint64_t seed, int count);
/// fn defaults to the library's closed form; tests pass a corrupted one to
/// prove the check can fail.
Item check_sector_integral(const ScalarFn& fn = {});
Item check_metric_paper_example();
Item check_shrinkage_bound(std::uint64_t seed, std::size_t n_points = 5000,
                           int seeds = 2);

/// The whole suite with library defaults, as run by `archetype verify`.
Report run_all(std::uint64_t seed);

}  // namespace arch::verify
