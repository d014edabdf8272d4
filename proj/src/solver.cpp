#include "archetype/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "archetype/geometry.hpp"
#include "archetype/rng.hpp"

namespace arch {

void AaProblem::validate() const {
    if (X.rows() == 0 || X.cols() == 0) {
        throw std::invalid_argument("AaProblem: empty data matrix");
    }
    X.require_finite("AaProblem data");
    if (k < 1) throw std::invalid_argument("AaProblem: k must be at least 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("AaProblem: alpha must be >= 0");
}

double variance(const Matrix& z) {
    const std::size_t d = z.rows(), k = z.cols();
    if (k == 0) throw std::invalid_argument("variance: empty matrix");
    std::vector<double> mean(d, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const double* c = z.col_data(j);
        for (std::size_t i = 0; i < d; ++i) mean[i] += c[i];
    }
    for (double& m : mean) m /= double(k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double* c = z.col_data(j);
        for (std::size_t i = 0; i < d; ++i) {
            const double dlt = c[i] - mean[i];
            s += dlt * dlt;
        }
    }
    return s / double(k);
}

double objective(const AaProblem& p, const AaState& s) {
    p.validate();
    const std::size_t d = p.X.rows(), n = p.X.cols(), k = std::size_t(p.k);
    if (s.Z.rows() != d || s.Z.cols() != k || s.B.rows() != k || s.B.cols() != n) {
        throw std::invalid_argument("objective: state shape does not match problem");
    }
    double fid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = p.X.col_data(i);
        const double* b = s.B.col_data(i);
        for (std::size_t r = 0; r < d; ++r) {
            double res = x[r];
            for (std::size_t j = 0; j < k; ++j) res -= s.Z(r, j) * b[j];
            fid += res * res;
        }
    }
    fid /= double(n);
    return p.alpha == 0.0 ? fid : fid + p.alpha * variance(s.Z);
}

Matrix extreme_point_filter(const Matrix& x) {
    if (x.rows() != 2 || x.cols() < 3) return x;
    const std::vector<std::size_t> hull = convex_hull_indices(columns_as_vec2(x));
    Matrix out(2, hull.size());
    for (std::size_t j = 0; j < hull.size(); ++j) {
        out(0, j) = x(0, hull[j]);
        out(1, j) = x(1, hull[j]);
    }
    return out;
}

namespace {

std::vector<double> uniform_weights(std::size_t q) {
    return std::vector<double>(q, 1.0 / double(q));
}

// Coefficients expressing `point` over the design columns: an exact indicator
// when the point is one of them, otherwise a CLS fit from the uniform start.
std::vector<double> coefficients_for_point(const ClsSolver& solver,
                                           const std::vector<double>& point,
                                           const PgdConfig& pgd) {
    const Matrix& d = solver.design();
    for (std::size_t j = 0; j < d.cols(); ++j) {
        bool match = true;
        for (std::size_t i = 0; i < d.rows() && match; ++i) {
            match = d(i, j) == point[i];
        }
        if (match) {
            std::vector<double> w(d.cols(), 0.0);
            w[j] = 1.0;
            return w;
        }
    }
    return solver.solve(point, uniform_weights(d.cols()), pgd);
}

// The ℓ-th column's completed-square target and its positive scale. With
// B fixed, the objective as a function of a_ℓ is denom·‖a_ℓ − target‖² up to
// a constant, so the column update reduces to constrained least squares.
struct ColumnTarget {
    std::vector<double> point;
    double denom = 0.0;
};

ColumnTarget column_target(const Matrix& x_bt, const Matrix& gram, const Matrix& z,
                           std::size_t ell, double n, int k, double alpha) {
    const std::size_t d = z.rows();
    ColumnTarget t;
    t.denom = gram(ell, ell) / n + alpha * double(k - 1) / double(k) / double(k);
    if (t.denom <= 0.0) return t;
    std::vector<double> m(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) m[i] = x_bt(i, ell);
    for (std::size_t s = 0; s < std::size_t(k); ++s) {
        if (s == ell) continue;
        const double g = gram(ell, s);
        const double* as = z.col_data(s);
        for (std::size_t i = 0; i < d; ++i) m[i] -= g * as[i];
    }
    for (double& v : m) v /= n;
    if (alpha > 0.0) {
        const double w = alpha / double(k) / double(k);
        for (std::size_t s = 0; s < std::size_t(k); ++s) {
            if (s == ell) continue;
            const double* as = z.col_data(s);
            for (std::size_t i = 0; i < d; ++i) m[i] += w * as[i];
        }
    }
    t.point.resize(d);
    for (std::size_t i = 0; i < d; ++i) t.point[i] = m[i] / t.denom;
    return t;
}

class FitEngine {
public:
    FitEngine(const AaProblem& p, const SolverConfig& cfg)
        : p_(p), cfg_(cfg), n_(p.X.cols()), d_(p.X.rows()), k_(std::size_t(p.k)) {
        const bool filter =
            cfg.caratheodory == HullFilter::On ||
            (cfg.caratheodory == HullFilter::Auto && d_ == 2 && n_ > 500);
        if (filter && d_ == 2 && n_ >= 3) {
            design_cols_ = convex_hull_indices(columns_as_vec2(p.X));
        } else {
            design_cols_.resize(n_);
            std::iota(design_cols_.begin(), design_cols_.end(), std::size_t{0});
        }
        Matrix design(d_, design_cols_.size());
        for (std::size_t j = 0; j < design_cols_.size(); ++j) {
            for (std::size_t i = 0; i < d_; ++i) design(i, j) = p.X(i, design_cols_[j]);
        }
        design_solver_.emplace(std::move(design));

        init_archetypes();
        b_ = Matrix(k_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < k_; ++j) b_(j, i) = 1.0 / double(k_);
        }
        update_b_inplace();
    }

    void sweep_z() {
        const Matrix x_bt = matmul(p_.X, transpose(b_));  // d×k, fixed per sweep
        const Matrix gram = matmul(b_, transpose(b_));    // k×k
        for (std::size_t ell = 0; ell < k_; ++ell) {
            const ColumnTarget t =
                column_target(x_bt, gram, z_, ell, double(n_), p_.k, p_.alpha);
            if (t.denom <= 0.0) {
                skipped_.insert(int(ell));
                continue;
            }
            std::vector<double> w =
                design_solver_->solve(t.point, acoef_.col(ell), cfg_.pgd);
            acoef_.set_col(ell, w);
            z_.set_col(ell, matvec(design_solver_->design(), w));
        }
    }

    void update_b_inplace() {
        ClsSolver zsolver(z_);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::vector<double> w = zsolver.solve(p_.X.col(i), b_.col(i), cfg_.pgd);
            b_.set_col(i, w);
        }
    }

    double current_objective() const {
        AaState s;
        s.B = b_;
        s.Z = z_;
        s.A = Matrix(n_, k_);  // objective() reads B and Z only
        return objective(p_, s);
    }

    AaState snapshot() const {
        AaState s;
        s.A = Matrix(n_, k_);
        for (std::size_t j = 0; j < k_; ++j) {
            for (std::size_t r = 0; r < design_cols_.size(); ++r) {
                s.A(design_cols_[r], j) = acoef_(r, j);
            }
        }
        s.B = b_;
        s.Z = z_;
        return s;
    }

    const Matrix& z() const { return z_; }
    std::vector<int> skipped() const { return {skipped_.begin(), skipped_.end()}; }

private:
    void init_archetypes() {
        const std::size_t q = design_cols_.size();
        acoef_ = Matrix(q, k_);
        z_ = Matrix(d_, k_);
        if (cfg_.init == InitStrategy::Provided) {
            if (cfg_.init_z.rows() != d_ || cfg_.init_z.cols() != k_) {
                throw std::invalid_argument("fit: provided init_z must be d×k");
            }
            cfg_.init_z.require_finite("fit init_z");
            for (std::size_t j = 0; j < k_; ++j) {
                const std::vector<double> w = coefficients_for_point(
                    *design_solver_, cfg_.init_z.col(j), cfg_.pgd);
                acoef_.set_col(j, w);
                z_.set_col(j, matvec(design_solver_->design(), w));
            }
            return;
        }
        if (k_ > n_) {
            throw std::invalid_argument(
                "fit: random initialization needs k <= N distinct data points");
        }
        CounterRng rng(cfg_.seed, /*stream=*/1);
        std::vector<std::size_t> pool(n_);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t j = 0; j < k_; ++j) {
            const std::size_t r = j + std::size_t(rng.next_u64() % (n_ - j));
            std::swap(pool[j], pool[r]);
            const std::vector<double> w = coefficients_for_point(
                *design_solver_, p_.X.col(pool[j]), cfg_.pgd);
            acoef_.set_col(j, w);
            z_.set_col(j, matvec(design_solver_->design(), w));
        }
    }

    const AaProblem& p_;
    SolverConfig cfg_;
    std::size_t n_, d_, k_;
    std::vector<std::size_t> design_cols_;
    std::optional<ClsSolver> design_solver_;
    Matrix acoef_;  // design_cols × k
    Matrix b_;
    Matrix z_;
    std::set<int> skipped_;
};

}  // namespace

AaState update_b(const AaProblem& p, const AaState& s, const PgdConfig& cfg) {
    p.validate();
    const std::size_t n = p.X.cols(), k = std::size_t(p.k);
    if (s.Z.rows() != p.X.rows() || s.Z.cols() != k) {
        throw std::invalid_argument("update_b: Z shape does not match problem");
    }
    s.Z.require_finite("update_b Z");
    AaState out = s;
    out.B = Matrix(k, n);
    ClsSolver zsolver(s.Z);
    const bool warm = s.B.rows() == k && s.B.cols() == n;
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> w0 = warm ? s.B.col(i) : uniform_weights(k);
        out.B.set_col(i, zsolver.solve(p.X.col(i), w0, cfg));
    }
    return out;
}

AaState update_z_column(const AaProblem& p, const AaState& s, int ell,
                        const PgdConfig& cfg) {
    p.validate();
    const std::size_t n = p.X.cols(), k = std::size_t(p.k);
    if (ell < 0 || std::size_t(ell) >= k) {
        throw std::invalid_argument("update_z_column: column index out of range");
    }
    if (s.B.rows() != k || s.B.cols() != n || s.Z.rows() != p.X.rows() ||
        s.Z.cols() != k || s.A.rows() != n || s.A.cols() != k) {
        throw std::invalid_argument("update_z_column: state shape does not match problem");
    }
    const Matrix x_bt = matmul(p.X, transpose(s.B));
    const Matrix gram = matmul(s.B, transpose(s.B));
    const ColumnTarget t =
        column_target(x_bt, gram, s.Z, std::size_t(ell), double(n), p.k, p.alpha);
    if (t.denom <= 0.0) return s;  // degenerate row: leave the column unchanged

    AaState out = s;
    ClsSolver xsolver(p.X);
    const std::vector<double> w = xsolver.solve(t.point, s.A.col(ell), cfg);
    out.A.set_col(ell, w);
    out.Z.set_col(ell, matvec(p.X, w));
    return out;
}

FitReport fit(const AaProblem& p, const SolverConfig& cfg, const FitObserver& observer) {
    const auto t0 = std::chrono::steady_clock::now();
    p.validate();
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("fit: tol must be positive");
    if (cfg.max_iters < 1) throw std::invalid_argument("fit: max_iters must be >= 1");

    FitEngine engine(p, cfg);
    FitReport report;
    report.objective_trace.push_back(engine.current_objective());
    if (observer) observer(0, engine.snapshot());

    for (int it = 1; it <= cfg.max_iters; ++it) {
        const Matrix z_prev = engine.z();
        engine.sweep_z();
        engine.update_b_inplace();

        const double f = engine.current_objective();
        if (!std::isfinite(f)) {
            throw std::runtime_error("fit: objective became non-finite at iteration " +
                                     std::to_string(it));
        }
        report.objective_trace.push_back(f);
        report.iterations = it;
        if (observer) observer(it, engine.snapshot());

        double delta = 0.0;
        for (std::size_t i = 0; i < z_prev.data().size(); ++i) {
            const double d = engine.z().data()[i] - z_prev.data()[i];
            delta += d * d;
        }
        if (delta < cfg.tol) {
            report.converged = true;
            break;
        }
    }

    report.state = engine.snapshot();
    report.skipped_columns = engine.skipped();
    report.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace arch
