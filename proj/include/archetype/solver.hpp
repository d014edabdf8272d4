#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "archetype/matrix.hpp"
#include "archetype/simplex.hpp"

namespace arch {

/// Archetypal-analysis instance: find k archetypes in co(X) minimizing
///   (1/N)‖X − X·A·B‖²_F + (α/k)·Σ_ℓ ‖a_ℓ − ā‖²₂
/// over column-stochastic A (N×k) and B (k×N). α = 0 is the plain problem;
/// α > 0 the variance-regularized one for unbounded-support data.
struct AaProblem {
    Matrix X;  // d×N, observations as columns
    int k = 1;
    double alpha = 0.0;
    void validate() const;
};

/// Iterate state. Z caches X·A; columns of A and B live on the simplex.
struct AaState {
    Matrix A;  // N×k
    Matrix B;  // k×N
    Matrix Z;  // d×k
};

enum class InitStrategy { RandomDataPoints, Provided };
enum class HullFilter { Auto, On, Off };  // Auto: on for d == 2 with N > 500

struct SolverConfig {
    double tol = 1e-6;  // stop when ‖Z⁽ᵖ⁺¹⁾ − Z⁽ᵖ⁾‖²_F < tol
    int max_iters = 500;
    std::uint64_t seed = 0;
    InitStrategy init = InitStrategy::RandomDataPoints;
    Matrix init_z;  // d×k starting archetypes when init == Provided
    PgdConfig pgd{};
    HullFilter caratheodory = HullFilter::Auto;
};

struct FitReport {
    AaState state;
    std::vector<double> objective_trace;  // F² per outer iteration, entry 0 at init
    int iterations = 0;
    bool converged = false;
    double wall_time_sec = 0.0;
    std::vector<int> skipped_columns;  // Z-columns left unchanged on a degenerate B-row
};

/// Called after initialization (iteration 0) and after each outer iteration;
/// lets the harness save snapshots without touching the solver loop.
using FitObserver = std::function<void(int iteration, const AaState&)>;

/// F²_{ν,α} on the empirical measure: fidelity term plus α·variance(Z).
double objective(const AaProblem& p, const AaState& s);

/// (1/k)·Σ_ℓ ‖a_ℓ − ā‖²₂ over the columns of z.
double variance(const Matrix& z);

/// Vertices of co(X) for planar data (pass-through for d ≠ 2 or N < 3).
/// Fitting against the filtered matrix spans the same feasible set.
Matrix extreme_point_filter(const Matrix& x);

// Single block updates, exposed for testing; fit() runs a cached variant.
AaState update_b(const AaProblem& p, const AaState& s, const PgdConfig& cfg = {});
AaState update_z_column(const AaProblem& p, const AaState& s, int ell,
                        const PgdConfig& cfg = {});

FitReport fit(const AaProblem& p, const SolverConfig& cfg,
              const FitObserver& observer = {});

}  // namespace arch
