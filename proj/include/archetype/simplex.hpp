#pragma once

#include <vector>

#include "archetype/matrix.hpp"

namespace arch {

/// Euclidean projection onto the probability simplex
/// {ω : ω_i ≥ 0, Σω_i = 1} by the sort–threshold scheme: sort descending,
/// find the pivot index ρ, subtract the threshold θ, clamp at zero. The sum
/// of the result is nudged onto 1.0 exactly so repeated projection is a
/// bit-identical no-op.
std::vector<double> project_simplex(const std::vector<double>& v);

/// Constrained least squares instance min_{ω∈simplex} ‖u − Cω‖².
struct ClsProblem {
    std::vector<double> u;  // length n
    Matrix C;               // n×q design, columns are candidate points
    ClsProblem(std::vector<double> target, Matrix design);
};

struct PgdConfig {
    double tau = 0.5;       // gradient-flow time per outer step
    int max_outer = 500;
    double step_tol = 1e-8;  // stop when successive iterates move less than this
};

/// Spectral data for one design matrix, reused across many targets and flow
/// times. When the design is wide (q > n) the decomposition is taken on the
/// n×n Gram matrix CCᵀ instead of the q×q CᵀC; both give the same flow, and
/// the null directions of CᵀC are untouched by it.
class ClsSolver {
public:
    explicit ClsSolver(Matrix design);

    std::size_t n() const { return c_.rows(); }
    std::size_t q() const { return c_.cols(); }
    const Matrix& design() const { return c_; }
    double sigma_max() const { return sigma_max_; }

    /// Exact solution at time t of dω/dt = −CᵀCω + Cᵀu from ω(0) = w0.
    std::vector<double> flow(const std::vector<double>& w0,
                             const std::vector<double>& u, double t) const;

    /// Projected gradient descent (flow for time τ, project, repeat).
    /// Returns the feasible iterate with the lowest residual seen, so the
    /// result is never worse than a feasible w0.
    std::vector<double> solve(const std::vector<double>& u, std::vector<double> w0,
                              const PgdConfig& cfg = {}) const;

    double residual_sq(const std::vector<double>& u, const std::vector<double>& w) const;

private:
    void polish_face(const std::vector<double>& u, std::vector<double>& best,
                     double& best_r) const;

    Matrix c_;
    Matrix modes_;              // q×m columns spanning the above-threshold eigenspace
    std::vector<double> sigma_;  // eigenvalue per mode column, descending
    bool has_null_drift_ = false;  // true when below-threshold modes are represented
    Matrix null_modes_;            // q×z columns for the σ≈0 drift branch (narrow route only)
    double sigma_max_ = 0.0;
};

// One-shot wrappers over ClsSolver matching the operation contracts.
std::vector<double> ode_flow(const ClsProblem& p, const std::vector<double>& w0, double t);
std::vector<double> solve_cls(const ClsProblem& p, const std::vector<double>& w0,
                              const PgdConfig& cfg = {});

/// Forward-Euler approximation of the same flow, the large-scale fallback.
/// Throws if step·λ_max(CᵀC) ≥ 2 (predicted divergence).
std::vector<double> ode_flow_euler(const ClsProblem& p, std::vector<double> w0,
                                   double t, double step);

}  // namespace arch
