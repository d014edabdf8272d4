#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "archetype/matrix.hpp"
#include "archetype/rng.hpp"

using namespace arch;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, CounterRng& rng) {
    Matrix m(rows, cols);
    for (double& x : m.data()) x = 2.0 * rng.next_unit() - 1.0;
    return m;
}

// Naive triple-loop product, the oracle matmul is checked against.
Matrix triple_loop_product(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
            r(i, j) = s;
        }
    return r;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

}  // namespace

TEST_CASE("matmul: identity and hand-computed cases") {
    CounterRng rng(7, 0);
    const Matrix m = random_matrix(3, 3, rng);
    CHECK(max_abs_diff(matmul(Matrix::identity(3), m), m) == 0.0);

    Matrix a(2, 2, {1, 3, 2, 4});  // [[1,2],[3,4]] column-major
    Matrix b(2, 1, {1, 1});
    const Matrix r = matmul(a, b);
    CHECK(r(0, 0) == 3.0);
    CHECK(r(1, 0) == 7.0);
}

TEST_CASE("matmul: matches the triple-loop oracle") {
    CounterRng rng(11, 0);
    const Matrix a = random_matrix(5, 4, rng);
    const Matrix b = random_matrix(4, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), triple_loop_product(a, b)) <= 1e-14);
}

TEST_CASE("matmul: dimension mismatch and non-finite input are rejected") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), std::invalid_argument);
    Matrix bad(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(matmul(bad, Matrix(2, 2)), std::invalid_argument);
}

TEST_CASE("matmul: associativity on random triples") {
    CounterRng rng(13, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_matrix(4, 3, rng);
        const Matrix b = random_matrix(3, 5, rng);
        const Matrix c = random_matrix(5, 2, rng);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        const double scale = std::sqrt(frobenius_norm_sq(left)) + 1e-30;
        CHECK(max_abs_diff(left, right) / scale <= 1e-9);
    }
}

TEST_CASE("frobenius_norm_sq: hand cases and exact-zero equivalence") {
    CHECK(frobenius_norm_sq(Matrix(3, 2)) == 0.0);
    CHECK(frobenius_norm_sq(Matrix::identity(2)) == 2.0);
    CHECK(frobenius_norm_sq(Matrix(2, 2, {1, 3, 2, 4})) == 30.0);

    CounterRng rng(17, 0);
    const Matrix a = random_matrix(3, 3, rng);
    Matrix b = a;
    Matrix diff(3, 3);
    for (std::size_t i = 0; i < 9; ++i) diff.data()[i] = a.data()[i] - b.data()[i];
    CHECK(frobenius_norm_sq(diff) == 0.0);
    b(1, 2) = std::nextafter(b(1, 2), 2.0);  // smallest representable change
    for (std::size_t i = 0; i < 9; ++i) diff.data()[i] = a.data()[i] - b.data()[i];
    CHECK(frobenius_norm_sq(diff) > 0.0);
}

TEST_CASE("sym_eig: diagonal and classic 2x2") {
    Matrix d(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    const SymEig e = sym_eig(d);
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.eigenvectors(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));

    const Matrix m(2, 2, {2, 1, 1, 2});
    const SymEig e2 = sym_eig(m);
    CHECK(e2.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(e2.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sym_eig: random Gram matrix reconstruction") {
    CounterRng rng(19, 0);
    const Matrix c = random_matrix(15, 10, rng);
    const Matrix gram = matmul(transpose(c), c);
    const SymEig e = sym_eig(gram);

    // reconstruction V diag(σ) Vᵀ
    Matrix vs = e.eigenvectors;
    for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t i = 0; i < 10; ++i) vs(i, j) *= e.eigenvalues[j];
    const Matrix rec = matmul(vs, transpose(e.eigenvectors));
    Matrix diff(10, 10);
    for (std::size_t i = 0; i < diff.data().size(); ++i) {
        diff.data()[i] = rec.data()[i] - gram.data()[i];
    }
    CHECK(std::sqrt(frobenius_norm_sq(diff) / frobenius_norm_sq(gram)) <= 1e-10);

    // orthonormality
    const Matrix vtv = matmul(transpose(e.eigenvectors), e.eigenvectors);
    Matrix ortho_err(10, 10);
    for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t i = 0; i < 10; ++i) {
            ortho_err(i, j) = vtv(i, j) - (i == j ? 1.0 : 0.0);
        }
    CHECK(std::sqrt(frobenius_norm_sq(ortho_err)) <= 1e-10);

    // PSD input: eigenvalues never meaningfully negative, sorted descending
    for (std::size_t j = 0; j < 10; ++j) {
        CHECK(e.eigenvalues[j] >= -1e-10);
        if (j) CHECK(e.eigenvalues[j] <= e.eigenvalues[j - 1]);
    }
}

TEST_CASE("sym_eig: rejects non-square and asymmetric inputs") {
    CHECK_THROWS_AS(sym_eig(Matrix(2, 3)), std::invalid_argument);
    Matrix m(2, 2, {1, 0.5, 0.7, 1});  // asymmetry far above 1e-12
    CHECK_THROWS_AS(sym_eig(m), std::invalid_argument);
}
