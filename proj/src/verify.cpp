#include "archetype/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "archetype/disk_oracle.hpp"
#include "archetype/rng.hpp"
#include "archetype/samplers.hpp"
#include "archetype/simplex.hpp"
#include "archetype/solver.hpp"

namespace arch::verify {

namespace {

constexpr double kPi = 3.14159265358979323846;

double residual_sq(const Matrix& c, const std::vector<double>& u,
                   const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        double r = u[i];
        for (std::size_t j = 0; j < c.cols(); ++j) r -= c(i, j) * w[j];
        s += r * r;
    }
    return s;
}

std::ostringstream detail_stream() {
    std::ostringstream os;
    os.precision(12);
    return os;
}

}  // namespace

std::vector<double> enumerate_simplex_projection(const std::vector<double>& v) {
    const std::size_t q = v.size();
    if (q == 0) throw std::invalid_argument("enumerate_simplex_projection: empty vector");
    if (q > 20) throw std::invalid_argument("enumerate_simplex_projection: q too large");
    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << q); ++mask) {
        double sum = 0.0;
        int card = 0;
        for (std::size_t i = 0; i < q; ++i) {
            if (mask & (std::uint64_t(1) << i)) {
                sum += v[i];
                ++card;
            }
        }
        const double theta = (sum - 1.0) / double(card);
        std::vector<double> w(q, 0.0);
        bool feasible = true;
        double dist = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            if (mask & (std::uint64_t(1) << i)) {
                w[i] = v[i] - theta;
                if (w[i] < 0.0) {
                    feasible = false;
                    break;
                }
            }
            const double d = w[i] - v[i];
            dist += d * d;
        }
        if (feasible && dist < best_dist) {
            best_dist = dist;
            best = std::move(w);
        }
    }
    return best;
}

std::vector<double> rk4_flow(const Matrix& c, const std::vector<double>& u,
                             std::vector<double> w0, double t, double step) {
    if (w0.size() != c.cols() || u.size() != c.rows()) {
        throw std::invalid_argument("rk4_flow: dimension mismatch");
    }
    const std::vector<double> ctu = tmatvec(c, u);
    const Matrix ctc = matmul(transpose(c), c);
    const auto deriv = [&](const std::vector<double>& w) {
        std::vector<double> g = matvec(ctc, w);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = ctu[i] - g[i];
        return g;
    };
    const long long nsteps = static_cast<long long>(std::llround(t / step));
    const double h = nsteps > 0 ? t / double(nsteps) : 0.0;
    std::vector<double> k1, k2, k3, k4, tmp(w0.size());
    for (long long s = 0; s < nsteps; ++s) {
        k1 = deriv(w0);
        for (std::size_t i = 0; i < w0.size(); ++i) tmp[i] = w0[i] + 0.5 * h * k1[i];
        k2 = deriv(tmp);
        for (std::size_t i = 0; i < w0.size(); ++i) tmp[i] = w0[i] + 0.5 * h * k2[i];
        k3 = deriv(tmp);
        for (std::size_t i = 0; i < w0.size(); ++i) tmp[i] = w0[i] + h * k3[i];
        k4 = deriv(tmp);
        for (std::size_t i = 0; i < w0.size(); ++i) {
            w0[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    return w0;
}

double grid_refine_cls_objective(const Matrix& c, const std::vector<double>& u,
                                 int divisions) {
    const std::size_t q = c.cols();
    std::vector<double> best;
    double best_obj = std::numeric_limits<double>::infinity();

    // Enumerate lattice points ω = counts/divisions with Σcounts = divisions.
    std::vector<int> counts(q, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos + 1 == q) {
            counts[pos] = left;
            std::vector<double> w(q);
            for (std::size_t i = 0; i < q; ++i) w[i] = double(counts[i]) / double(divisions);
            const double obj = residual_sq(c, u, w);
            if (obj < best_obj) {
                best_obj = obj;
                best = std::move(w);
            }
            return;
        }
        for (int take = 0; take <= left; ++take) {
            counts[pos] = take;
            rec(pos + 1, left - take);
        }
    };
    rec(0, divisions);

    // Pairwise mass exchanges with a shrinking step keep every iterate
    // feasible and, for a convex objective, land on the optimum.
    for (double delta = 1.0 / double(divisions); delta >= 1e-9; delta *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t i = 0; i < q; ++i) {
                if (best[i] < delta) continue;
                for (std::size_t j = 0; j < q; ++j) {
                    if (i == j) continue;
                    std::vector<double> w = best;
                    w[i] -= delta;
                    w[j] += delta;
                    const double obj = residual_sq(c, u, w);
                    if (obj < best_obj - 1e-15 * (1.0 + best_obj)) {
                        best_obj = obj;
                        best = std::move(w);
                        improved = true;
                    }
                }
            }
        }
    }
    return best_obj;
}

namespace {

// Inner radial integral of the sector integrand: ∫ (r·c − h)² r dr from
// r0 = h/c to 1, with c = cos(θ − α/2) and h = cos(α/2); a cubic in r.
double radial_part(double theta, double alpha) {
    const double h = std::cos(alpha / 2.0);
    const double c = std::cos(theta - alpha / 2.0);
    const auto anti = [&](double r) {
        return c * c * r * r * r * r / 4.0 - 2.0 * c * h * r * r * r / 3.0 +
               h * h * r * r / 2.0;
    };
    const double r0 = h / c;
    return anti(1.0) - anti(r0);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fb, double fm, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double quadrature_sector_integral(double alpha, double tol) {
    if (!(alpha >= 0.0 && alpha <= kPi)) {
        throw std::invalid_argument("quadrature_sector_integral: alpha outside [0, pi]");
    }
    if (alpha == 0.0) return 0.0;
    const auto f = [&](double theta) { return radial_part(theta, alpha); };
    const double a = 0.0, b = alpha / 2.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double integral =
        adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 40);
    return 2.0 / kPi * integral;
}

std::vector<std::size_t> gift_wrap_hull(const std::vector<Vec2>& pts) {
    if (pts.empty()) throw std::invalid_argument("gift_wrap_hull: empty point set");
    std::size_t start = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].x < pts[start].x ||
            (pts[i].x == pts[start].x && pts[i].y < pts[start].y)) {
            start = i;
        }
    }
    const auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (pts[a].x - pts[o].x) * (pts[b].y - pts[o].y) -
               (pts[a].y - pts[o].y) * (pts[b].x - pts[o].x);
    };
    const auto dist_sq = [&](std::size_t a, std::size_t b) {
        const double dx = pts[a].x - pts[b].x, dy = pts[a].y - pts[b].y;
        return dx * dx + dy * dy;
    };
    std::vector<std::size_t> hull;
    std::size_t cur = start;
    do {
        hull.push_back(cur);
        std::size_t next = cur;
        for (std::size_t cand = 0; cand < pts.size(); ++cand) {
            if (cand == cur) continue;
            if (next == cur) {
                next = cand;
                continue;
            }
            const double c = cross(cur, next, cand);
            // Counter-clockwise wrap; on ties take the farthest point so
            // collinear interior points never enter the hull.
            if (c < 0.0 || (c == 0.0 && dist_sq(cur, cand) > dist_sq(cur, next))) {
                next = cand;
            }
        }
        if (next == cur) break;  // all points coincide
        cur = next;
        if (hull.size() > pts.size()) {
            throw std::runtime_error("gift_wrap_hull: wrap failed to close");
        }
    } while (cur != start);
    return hull;
}

bool Report::all_pass() const {
    for (const Item& item : items) {
        if (!item.pass) return false;
    }
    return true;
}

Item check_simplex_projection(std::uint64_t seed, int count, const ProjectionFn& fn) {
    const ProjectionFn proj = fn ? fn : ProjectionFn(
        [](const std::vector<double>& v) { return project_simplex(v); });
    CounterRng rng(seed, 101);
    double worst = 0.0;
    for (int trial = 0; trial < count; ++trial) {
        const std::size_t q = 1 + std::size_t(rng.next_u64() % 8);
        std::vector<double> v(q);
        const double scale = std::exp(3.0 * (rng.next_unit() - 0.5));
        for (double& x : v) x = scale * (4.0 * rng.next_unit() - 2.0);
        const std::vector<double> got = proj(v);
        const std::vector<double> want = enumerate_simplex_projection(v);
        for (std::size_t i = 0; i < q; ++i) {
            worst = std::max(worst, std::abs(got[i] - want[i]));
        }
    }
    auto os = detail_stream();
    os << "max |omega - oracle| = " << worst << " over " << count << " vectors";
    return {"simplex projection vs active-set enumeration", worst <= 1e-10, os.str()};
}

Item check_cls_objective(std::uint64_t seed, int count) {
    CounterRng rng(seed, 102);
    double worst = 0.0;
    for (int trial = 0; trial < count; ++trial) {
        const std::size_t n = 1 + std::size_t(rng.next_u64() % 4);
        const std::size_t q = 1 + std::size_t(rng.next_u64() % 5);
        Matrix c(n, q);
        for (double& x : c.data()) x = 2.0 * rng.next_unit() - 1.0;
        std::vector<double> u(n);
        for (double& x : u) x = 2.0 * rng.next_unit() - 1.0;
        const std::vector<double> w =
            solve_cls(ClsProblem(u, c), std::vector<double>(q, 1.0 / double(q)));
        const double got = residual_sq(c, u, w);
        const double want = grid_refine_cls_objective(c, u);
        worst = std::max(worst, std::abs(got - want));
    }
    auto os = detail_stream();
    os << "max |objective - oracle| = " << worst << " over " << count << " problems";
    return {"constrained least squares vs grid-refined oracle", worst <= 1e-6, os.str()};
}

Item check_ode_flow(std::uint64_t seed, int count) {
    CounterRng rng(seed, 103);
    double worst = 0.0;
    for (int trial = 0; trial < count; ++trial) {
        const std::size_t n = 2 + std::size_t(rng.next_u64() % 3);
        const std::size_t q = 2 + std::size_t(rng.next_u64() % 4);
        Matrix c(n, q);
        for (double& x : c.data()) x = 2.0 * rng.next_unit() - 1.0;
        std::vector<double> u(n), w0(q);
        for (double& x : u) x = 2.0 * rng.next_unit() - 1.0;
        for (double& x : w0) x = rng.next_unit();
        const double t = 0.1 + 0.9 * rng.next_unit();
        const std::vector<double> got = ode_flow(ClsProblem(u, c), w0, t);
        const std::vector<double> want = rk4_flow(c, u, w0, t, 1e-4);
        for (std::size_t i = 0; i < q; ++i) {
            worst = std::max(worst, std::abs(got[i] - want[i]));
        }
    }
    auto os = detail_stream();
    os << "max |flow - RK4| = " << worst << " over " << count << " problems";
    return {"exact gradient flow vs RK4 integration", worst <= 1e-8, os.str()};
}

Item check_sector_integral(const ScalarFn& fn) {
    const ScalarFn f = fn ? fn : ScalarFn([](double a) { return disk::sector_integral(a); });
    auto os = detail_stream();
    bool pass = true;
    if (f(0.0) != 0.0) {
        pass = false;
        os << "I(0) = " << f(0.0) << " != 0; ";
    }
    if (f(kPi) != 0.125) {
        pass = false;
        os << "I(pi) = " << f(kPi) << " != 1/8; ";
    }
    double worst = 0.0;
    for (const double alpha :
         {kPi / 6.0, kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0, 5.0 * kPi / 6.0, kPi}) {
        worst = std::max(worst, std::abs(f(alpha) - quadrature_sector_integral(alpha)));
    }
    if (worst > 1e-8) pass = false;
    os << "max |I - quadrature| = " << worst;
    return {"sector integral vs adaptive quadrature", pass, os.str()};
}

Item check_metric_paper_example() {
    const PointSet a = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
    const PointSet b = {{0.5, 0.0}, {2.0, 0.1}, {2.0, -0.1}};
    const double dh = hausdorff(a, b);
    const double d2 = d2_infty(a, b);
    const bool pass =
        std::abs(dh - 0.5) <= 1e-12 && std::abs(d2 - std::sqrt(1.01)) <= 1e-12;
    auto os = detail_stream();
    os << "d_H = " << dh << " (expect 0.5), d_2inf = " << d2 << " (expect sqrt(1.01) = "
       << std::sqrt(1.01) << ")";
    return {"paper example: d_H = 0.5 < sqrt(1.01) = d_2inf", pass, os.str()};
}

Item check_shrinkage_bound(std::uint64_t seed, std::size_t n_points, int seeds) {
    const int k = 3;
    bool pass = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < seeds && pass; ++rep) {
        const std::uint64_t s = derive_seed(seed, 7000 + std::uint64_t(rep));
        const Matrix x =
            sample(DistributionSpec::gaussian_iso({0.0, 0.0}, 10.0), n_points, s);
        std::vector<double> mean(2, 0.0);
        for (std::size_t i = 0; i < x.cols(); ++i) {
            mean[0] += x(0, i);
            mean[1] += x(1, i);
        }
        mean[0] /= double(x.cols());
        mean[1] /= double(x.cols());
        double sigma_sq = 0.0;
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double dx = x(0, i) - mean[0], dy = x(1, i) - mean[1];
            sigma_sq += dx * dx + dy * dy;
        }
        sigma_sq /= double(x.cols());

        for (const double alpha : {16.0, 256.0}) {
            AaProblem prob{x, k, alpha};
            SolverConfig cfg;
            cfg.seed = s;
            const FitReport rep_fit = fit(prob, cfg);
            PointSet z = columns_as_points(rep_fit.state.Z);
            PointSet mean_set(k, mean);
            const double d2 = d2_infty(z, mean_set);
            const double bound = 8.0 * std::sqrt(double(k)) * std::pow(alpha, -0.25) *
                                 std::sqrt(sigma_sq);
            double diam = 0.0;
            for (int i = 0; i < k; ++i) {
                for (int j = i + 1; j < k; ++j) {
                    double dsq = 0.0;
                    for (int r = 0; r < 2; ++r) {
                        const double d = z[i][r] - z[j][r];
                        dsq += d * d;
                    }
                    diam = std::max(diam, std::sqrt(dsq));
                }
            }
            const double f_val =
                std::sqrt(objective(prob, rep_fit.state));
            const double diam_bound =
                4.0 * std::sqrt(double(k)) / std::sqrt(alpha) * f_val;
            if (d2 > bound || diam > diam_bound) pass = false;
            worst_margin = std::min({worst_margin, bound - d2, diam_bound - diam});
        }
    }
    auto os = detail_stream();
    os << "smallest bound margin = " << worst_margin << " over " << seeds
       << " seeds, alpha in {16, 256}, N = " << n_points;
    return {"variance-regularization shrinkage and diameter bounds", pass, os.str()};
}

Report run_all(std::uint64_t seed) {
    Report r;
    r.items.push_back(check_simplex_projection(seed, 200));
    r.items.push_back(check_cls_objective(seed, 25));
    r.items.push_back(check_ode_flow(seed, 25));
    r.items.push_back(check_sector_integral());
    r.items.push_back(check_metric_paper_example());
    r.items.push_back(check_shrinkage_bound(seed));
    return r;
}

}  // namespace arch::verify
