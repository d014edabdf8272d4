#include "archetype/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace arch {

std::vector<double> project_simplex(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("project_simplex: empty vector");
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("project_simplex: non-finite entry");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return v[a] != v[b] ? v[a] > v[b] : a < b;
    });

    std::vector<double> prefix(n);
    double run = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        run += v[order[j]];
        prefix[j] = run;
    }

    // Largest j with μ_j − (Σ_{r≤j} μ_r − 1)/j > 0; j = 1 always qualifies.
    std::size_t rho = 1;
    for (std::size_t j = n; j >= 1; --j) {
        if (v[order[j - 1]] - (prefix[j - 1] - 1.0) / double(j) > 0.0) {
            rho = j;
            break;
        }
    }
    const double theta = (prefix[rho - 1] - 1.0) / double(rho);

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(v[i] - theta, 0.0);

    // Drift absorption: force the descending-order sum onto 1.0 exactly, so
    // projecting an already-projected vector returns it unchanged.
    for (int pass = 0; pass < 8; ++pass) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += w[order[j]];
        if (s == 1.0) break;
        w[order[0]] += 1.0 - s;
    }
    return w;
}

ClsProblem::ClsProblem(std::vector<double> target, Matrix design)
    : u(std::move(target)), C(std::move(design)) {
    if (C.rows() == 0 || C.cols() == 0) {
        throw std::invalid_argument("ClsProblem: empty design matrix");
    }
    if (u.size() != C.rows()) {
        throw std::invalid_argument(
            "ClsProblem: target length " + std::to_string(u.size()) +
            " does not match design rows " + std::to_string(C.rows()));
    }
    C.require_finite("ClsProblem design");
    for (double x : u) {
        if (!std::isfinite(x)) throw std::invalid_argument("ClsProblem: non-finite target");
    }
}

ClsSolver::ClsSolver(Matrix design) : c_(std::move(design)) {
    if (c_.rows() == 0 || c_.cols() == 0) {
        throw std::invalid_argument("ClsSolver: empty design matrix");
    }
    c_.require_finite("ClsSolver design");
    const std::size_t n = c_.rows(), q = c_.cols();

    if (q <= n) {
        const SymEig eig = sym_eig(matmul(transpose(c_), c_));
        sigma_max_ = std::max(eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues[0], 0.0);
        const double thr = 1e-12 * sigma_max_;
        std::size_t m = 0;
        while (m < q && eig.eigenvalues[m] > thr) ++m;
        modes_ = Matrix(q, m);
        sigma_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            sigma_[j] = eig.eigenvalues[j];
            for (std::size_t i = 0; i < q; ++i) modes_(i, j) = eig.eigenvectors(i, j);
        }
        null_modes_ = Matrix(q, q - m);
        for (std::size_t j = m; j < q; ++j)
            for (std::size_t i = 0; i < q; ++i)
                null_modes_(i, j - m) = eig.eigenvectors(i, j);
        has_null_drift_ = true;
    } else {
        // Wide design: the nonzero spectrum of CᵀC equals that of CCᵀ, and
        // v_i = Cᵀw_i/√λ_i maps the eigenvectors across. Directions of CᵀC
        // below threshold are in (or indistinguishable from) null(C), where
        // the forcing CᵀU has no component, so the flow leaves them alone.
        const SymEig eig = sym_eig(matmul(c_, transpose(c_)));
        sigma_max_ = std::max(eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues[0], 0.0);
        const double thr = 1e-12 * sigma_max_;
        std::size_t m = 0;
        while (m < n && eig.eigenvalues[m] > thr) ++m;
        modes_ = Matrix(q, m);
        sigma_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            sigma_[j] = eig.eigenvalues[j];
            const double inv = 1.0 / std::sqrt(eig.eigenvalues[j]);
            std::vector<double> wj(n);
            for (std::size_t i = 0; i < n; ++i) wj[i] = eig.eigenvectors(i, j);
            const std::vector<double> vj = tmatvec(c_, wj);
            for (std::size_t i = 0; i < q; ++i) modes_(i, j) = vj[i] * inv;
        }
        has_null_drift_ = false;
    }
}

std::vector<double> ClsSolver::flow(const std::vector<double>& w0,
                                    const std::vector<double>& u, double t) const {
    if (w0.size() != q()) throw std::invalid_argument("ClsSolver::flow: state length mismatch");
    if (u.size() != n()) throw std::invalid_argument("ClsSolver::flow: target length mismatch");
    if (!(t >= 0.0)) throw std::invalid_argument("ClsSolver::flow: negative time");
    if (t == 0.0) return w0;

    const std::vector<double> b = tmatvec(c_, u);  // CᵀU
    std::vector<double> r = w0;
    for (std::size_t j = 0; j < sigma_.size(); ++j) {
        const double* vj = modes_.col_data(j);
        double p0 = 0.0, beta = 0.0;
        for (std::size_t i = 0; i < q(); ++i) {
            p0 += vj[i] * w0[i];
            beta += vj[i] * b[i];
        }
        const double e = std::exp(-sigma_[j] * t);
        const double coef = (e - 1.0) * p0 + (1.0 - e) / sigma_[j] * beta;
        for (std::size_t i = 0; i < q(); ++i) r[i] += coef * vj[i];
    }
    if (has_null_drift_) {
        for (std::size_t j = 0; j < null_modes_.cols(); ++j) {
            const double* vj = null_modes_.col_data(j);
            double beta = 0.0;
            for (std::size_t i = 0; i < q(); ++i) beta += vj[i] * b[i];
            const double coef = t * beta;
            for (std::size_t i = 0; i < q(); ++i) r[i] += coef * vj[i];
        }
    }
    return r;
}

double ClsSolver::residual_sq(const std::vector<double>& u,
                              const std::vector<double>& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
        double ri = u[i];
        for (std::size_t j = 0; j < q(); ++j) ri -= c_(i, j) * w[j];
        s += ri * ri;
    }
    return s;
}

namespace {

// In-place Gaussian elimination with partial pivoting on an (m×m) system.
// Returns false when a pivot is numerically zero.
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& rhs) {
    const std::size_t m = a.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-13) return false;
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t col = m; col-- > 0;) {
        double s = rhs[col];
        for (std::size_t c = col + 1; c < m; ++c) s -= a[col][c] * rhs[c];
        rhs[col] = s / a[col][col];
    }
    return true;
}

void require_feasible(const std::vector<double>& w, std::size_t q) {
    if (w.size() != q) throw std::invalid_argument("solve_cls: start length mismatch");
    double s = 0.0;
    for (double x : w) {
        if (!(x >= -1e-12)) throw std::invalid_argument("solve_cls: start has negative entry");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) {
        throw std::invalid_argument("solve_cls: start does not sum to 1");
    }
}

}  // namespace

std::vector<double> ClsSolver::solve(const std::vector<double>& u,
                                     std::vector<double> w0, const PgdConfig& cfg) const {
    require_feasible(w0, q());
    if (q() == 1) return {1.0};

    std::vector<double> best = w0;
    double best_r = residual_sq(u, best);
    std::vector<double> w = std::move(w0);
    const double tol_sq = cfg.step_tol * cfg.step_tol;

    for (int s = 0; s < cfg.max_outer; ++s) {
        std::vector<double> wn = project_simplex(flow(w, u, cfg.tau));
        const double r = residual_sq(u, wn);
        if (r < best_r) {
            best_r = r;
            best = wn;
        }
        double move = 0.0;
        for (std::size_t i = 0; i < wn.size(); ++i) {
            const double d = wn[i] - w[i];
            move += d * d;
        }
        w = std::move(wn);
        if (move < tol_sq) break;
    }
    polish_face(u, best, best_r);
    return best;
}

// The flow-then-project map with a fixed flow time stalls at points that can
// sit measurably off the constrained optimum when the active face mixes fast
// and slow eigendirections. The projected-gradient phase identifies the face;
// this phase solves the face exactly: equality-constrained least squares via
// the KKT system, with standard active-set add/drop moves on top. Results are
// accepted only when they improve the residual, so the phase can never hurt.
void ClsSolver::polish_face(const std::vector<double>& u, std::vector<double>& best,
                            double& best_r) const {
    constexpr std::size_t kFaceCap = 64;
    constexpr int kMaxMoves = 60;

    std::vector<std::size_t> face;
    for (std::size_t i = 0; i < q(); ++i) {
        if (best[i] > 1e-10) face.push_back(i);
    }
    if (face.empty() || face.size() > kFaceCap) return;

    const std::vector<double> b = tmatvec(c_, u);  // CᵀU over all columns
    std::vector<char> in_face(q(), 0);
    for (std::size_t i : face) in_face[i] = 1;

    for (int move = 0; move < kMaxMoves; ++move) {
        const std::size_t m = face.size();
        if (m == 0 || m > kFaceCap) return;

        // KKT system of min ‖u − C_T x‖² s.t. Σx = 1 on the face T.
        std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 0.0));
        std::vector<double> rhs(m + 1, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t s = r; s < m; ++s) {
                double dotv = 0.0;
                const double* cr = c_.col_data(face[r]);
                const double* cs = c_.col_data(face[s]);
                for (std::size_t i = 0; i < n(); ++i) dotv += cr[i] * cs[i];
                a[r][s] = a[s][r] = dotv;
            }
            a[r][m] = a[m][r] = 1.0;
            rhs[r] = b[face[r]];
        }
        rhs[m] = 1.0;
        if (!solve_dense(a, rhs)) return;  // degenerate face; keep the PGD answer

        double min_x = 0.0;
        std::size_t drop = m;
        for (std::size_t r = 0; r < m; ++r) {
            if (rhs[r] < min_x) {
                min_x = rhs[r];
                drop = r;
            }
        }
        if (min_x < -1e-12) {
            in_face[face[drop]] = 0;
            face.erase(face.begin() + std::ptrdiff_t(drop));
            continue;
        }

        std::vector<double> cand(q(), 0.0);
        for (std::size_t r = 0; r < m; ++r) cand[face[r]] = std::max(rhs[r], 0.0);
        cand = project_simplex(cand);  // absorbs clamp drift, keeps exact sum

        const double r_cand = residual_sq(u, cand);
        if (r_cand < best_r) {
            best_r = r_cand;
            best = cand;
        }

        // Off-face optimality: the gradient must not undercut the multiplier.
        std::vector<double> res = matvec(c_, cand);
        for (std::size_t i = 0; i < n(); ++i) res[i] -= u[i];
        const std::vector<double> g = tmatvec(c_, res);
        double lambda = 0.0;
        for (std::size_t r = 0; r < m; ++r) lambda += g[face[r]];
        lambda /= double(m);
        double worst = 0.0;
        std::size_t add = q();
        for (std::size_t i = 0; i < q(); ++i) {
            if (in_face[i]) continue;
            const double gap = lambda - g[i];
            if (gap > worst) {
                worst = gap;
                add = i;
            }
        }
        const double scale = 1.0 + std::abs(lambda);
        if (add == q() || worst <= 1e-11 * scale) return;  // KKT satisfied
        in_face[add] = 1;
        face.push_back(add);
        std::sort(face.begin(), face.end());
    }
}

std::vector<double> ode_flow(const ClsProblem& p, const std::vector<double>& w0, double t) {
    return ClsSolver(p.C).flow(w0, p.u, t);
}

std::vector<double> solve_cls(const ClsProblem& p, const std::vector<double>& w0,
                              const PgdConfig& cfg) {
    return ClsSolver(p.C).solve(p.u, w0, cfg);
}

std::vector<double> ode_flow_euler(const ClsProblem& p, std::vector<double> w0,
                                   double t, double step) {
    const std::size_t q = p.C.cols();
    if (w0.size() != q) throw std::invalid_argument("ode_flow_euler: state length mismatch");
    if (!(step > 0.0)) throw std::invalid_argument("ode_flow_euler: step must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("ode_flow_euler: negative time");
    if (t == 0.0) return w0;

    // Power iteration estimate of λ_max(CᵀC) for the stability gate.
    std::vector<double> x(q, 1.0 / std::sqrt(double(q)));
    double lam = 0.0;
    for (int it = 0; it < 100; ++it) {
        std::vector<double> y = tmatvec(p.C, matvec(p.C, x));
        const double ny = std::sqrt(norm2_sq(y));
        if (ny <= 1e-300) {
            lam = 0.0;
            break;
        }
        lam = dot(x, y);
        for (std::size_t i = 0; i < q; ++i) x[i] = y[i] / ny;
    }
    if (step * lam >= 2.0) {
        throw std::runtime_error(
            "ode_flow_euler: unstable step (step*lambda_max = " +
            std::to_string(step * lam) + " >= 2)");
    }

    const auto euler_step = [&](double h) {
        std::vector<double> res = matvec(p.C, w0);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] = p.u[i] - res[i];
        const std::vector<double> g = tmatvec(p.C, res);  // Cᵀ(u − Cw)
        for (std::size_t i = 0; i < q; ++i) w0[i] += h * g[i];
    };

    const double nsteps_f = std::floor(t / step);
    const long long nsteps = static_cast<long long>(nsteps_f);
    for (long long s = 0; s < nsteps; ++s) euler_step(step);
    const double rem = t - nsteps_f * step;
    if (rem > 0.0) euler_step(rem);

    for (double x_i : w0) {
        if (!std::isfinite(x_i)) {
            throw std::runtime_error("ode_flow_euler: iteration diverged");
        }
    }
    return w0;
}

}  // namespace arch
