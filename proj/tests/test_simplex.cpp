#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numeric>

#include "archetype/rng.hpp"
#include "archetype/simplex.hpp"
#include "archetype/verify.hpp"

using namespace arch;

namespace {

std::vector<double> random_vector(std::size_t n, CounterRng& rng, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * rng.next_unit();
    return v;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Matrix random_design(std::size_t n, std::size_t q, CounterRng& rng) {
    Matrix c(n, q);
    for (double& x : c.data()) x = 2.0 * rng.next_unit() - 1.0;
    return c;
}

double residual_norm(const Matrix& c, const std::vector<double>& u,
                     const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        double r = u[i];
        for (std::size_t j = 0; j < c.cols(); ++j) r -= c(i, j) * w[j];
        s += r * r;
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("project_simplex: feasible points and vertices") {
    CHECK(project_simplex({0.5, 0.5}) == std::vector<double>{0.5, 0.5});
    CHECK(project_simplex({2.0, 0.0}) == std::vector<double>{1.0, 0.0});
    CHECK_THROWS_AS(project_simplex({}), std::invalid_argument);
    CHECK_THROWS_AS(project_simplex({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("project_simplex: matches the active-set enumeration oracle") {
    CounterRng rng(23, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t q = 1 + std::size_t(rng.next_u64() % 6);
        const std::vector<double> v = random_vector(q, rng, -3.0, 3.0);
        worst = std::max(worst, linf(project_simplex(v),
                                     verify::enumerate_simplex_projection(v)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("project_simplex: bit-identical idempotence and feasibility") {
    CounterRng rng(29, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t q = 1 + std::size_t(rng.next_u64() % 12);
        const std::vector<double> v = random_vector(q, rng, -5.0, 5.0);
        const std::vector<double> once = project_simplex(v);
        CHECK(project_simplex(once) == once);
        double sum = 0.0;
        for (double x : once) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("project_simplex: permuting the input permutes the output") {
    CounterRng rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t q = 2 + std::size_t(rng.next_u64() % 7);
        const std::vector<double> v = random_vector(q, rng, -2.0, 2.0);
        std::vector<std::size_t> perm(q);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = q; i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.next_u64() % i]);
        }
        std::vector<double> vp(q);
        for (std::size_t i = 0; i < q; ++i) vp[i] = v[perm[i]];
        const std::vector<double> w = project_simplex(v);
        const std::vector<double> wp = project_simplex(vp);
        for (std::size_t i = 0; i < q; ++i) CHECK(wp[i] == w[perm[i]]);
    }
}

TEST_CASE("ode_flow: initial condition is returned exactly at t = 0") {
    CounterRng rng(37, 0);
    const Matrix c = random_design(3, 3, rng);
    const std::vector<double> u = random_vector(3, rng, -1.0, 1.0);
    const std::vector<double> w0 = {0.25, 0.5, 0.25};
    CHECK(ode_flow(ClsProblem(u, c), w0, 0.0) == w0);
}

TEST_CASE("ode_flow: decoupled scalar decay with identity design") {
    const Matrix c = Matrix::identity(3);
    const std::vector<double> u(3, 0.0);
    const std::vector<double> w0 = {1.0, 0.0, 0.0};
    const std::vector<double> w = ode_flow(ClsProblem(u, c), w0, 1.0);
    CHECK(w[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(std::abs(w[1]) <= 1e-15);
    CHECK(std::abs(w[2]) <= 1e-15);
}

TEST_CASE("ode_flow: matches RK4 integration on random problems") {
    CounterRng rng(41, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix c = random_design(4, 3, rng);
        const std::vector<double> u = random_vector(4, rng, -1.0, 1.0);
        const std::vector<double> w0 = random_vector(3, rng, 0.0, 1.0);
        const std::vector<double> exact = ode_flow(ClsProblem(u, c), w0, 0.5);
        const std::vector<double> rk = verify::rk4_flow(c, u, w0, 0.5, 1e-4);
        worst = std::max(worst, linf(exact, rk));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("ode_flow: wide designs take the dual route and agree with RK4") {
    CounterRng rng(43, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix c = random_design(2, 40, rng);
        const std::vector<double> u = random_vector(2, rng, -1.0, 1.0);
        const std::vector<double> w0 = random_vector(40, rng, 0.0, 0.05);
        const std::vector<double> exact = ode_flow(ClsProblem(u, c), w0, 0.3);
        const std::vector<double> rk = verify::rk4_flow(c, u, w0, 0.3, 1e-4);
        worst = std::max(worst, linf(exact, rk));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("ode_flow: semigroup property") {
    CounterRng rng(47, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix c = random_design(4, 4, rng);
        const std::vector<double> u = random_vector(4, rng, -1.0, 1.0);
        const std::vector<double> w0 = random_vector(4, rng, 0.0, 1.0);
        const ClsProblem p(u, c);
        const std::vector<double> one_hop = ode_flow(p, w0, 0.7);
        const std::vector<double> two_hop = ode_flow(p, ode_flow(p, w0, 0.3), 0.4);
        CHECK(linf(one_hop, two_hop) <= 1e-10);
    }
}

TEST_CASE("solve_cls: attainable target converges to the vertex") {
    CounterRng rng(53, 0);
    const Matrix c = random_design(4, 3, rng);
    const std::vector<double> u = c.col(1);
    const std::vector<double> w =
        solve_cls(ClsProblem(u, c), {1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(residual_norm(c, u, w) <= 1e-7);
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solve_cls: singleton simplex returns (1) for any target") {
    Matrix c(3, 1, {1.0, 2.0, 3.0});
    const std::vector<double> w = solve_cls(ClsProblem({-5.0, 0.0, 9.0}, c), {1.0});
    CHECK(w == std::vector<double>{1.0});
}

TEST_CASE("solve_cls: objective matches the grid-refined oracle") {
    CounterRng rng(59, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix c = random_design(3, 4, rng);
        const std::vector<double> u = random_vector(3, rng, -1.0, 1.0);
        const std::vector<double> w =
            solve_cls(ClsProblem(u, c), std::vector<double>(4, 0.25));
        const double got = residual_norm(c, u, w);
        const double want = std::sqrt(verify::grid_refine_cls_objective(c, u));
        worst = std::max(worst, std::abs(got * got - want * want));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("solve_cls: never worse than the starting point") {
    CounterRng rng(61, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix c = random_design(3, 5, rng);
        const std::vector<double> u = random_vector(3, rng, -2.0, 2.0);
        std::vector<double> w0 = project_simplex(random_vector(5, rng, -1.0, 1.0));
        const std::vector<double> w = solve_cls(ClsProblem(u, c), w0);
        CHECK(residual_norm(c, u, w) <= residual_norm(c, u, w0) + 1e-10);
        double sum = 0.0;
        for (double x : w) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("solve_cls: rejects an infeasible start") {
    Matrix c = Matrix::identity(2);
    CHECK_THROWS_AS(solve_cls(ClsProblem({1.0, 0.0}, c), {0.9, 0.9}),
                    std::invalid_argument);
}

TEST_CASE("ode_flow_euler: trivial time, single step, and exact-flow agreement") {
    CounterRng rng(67, 0);
    const Matrix c = random_design(3, 3, rng);
    const std::vector<double> u = random_vector(3, rng, -1.0, 1.0);
    const std::vector<double> w0 = {0.2, 0.3, 0.5};
    const ClsProblem p(u, c);

    CHECK(ode_flow_euler(p, w0, 0.0, 0.1) == w0);

    const double h = 0.05;
    const std::vector<double> one = ode_flow_euler(p, w0, h, h);
    const std::vector<double> ctu = tmatvec(c, u);
    const std::vector<double> ctcw = tmatvec(c, matvec(c, w0));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(one[i] == doctest::Approx(w0[i] + h * (ctu[i] - ctcw[i])).epsilon(1e-12));
    }

    const std::vector<double> euler = ode_flow_euler(p, w0, 0.5, 1e-4);
    const std::vector<double> exact = ode_flow(p, w0, 0.5);
    CHECK(linf(euler, exact) <= 1e-3);
}

TEST_CASE("ode_flow_euler: rejects an unstable step") {
    Matrix c(2, 2, {10.0, 0.0, 0.0, 10.0});  // λ_max(CᵀC) = 100
    const ClsProblem p({1.0, 1.0}, c);
    CHECK_THROWS_AS(ode_flow_euler(p, {0.5, 0.5}, 1.0, 0.05), std::runtime_error);
}
