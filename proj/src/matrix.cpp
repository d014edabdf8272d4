#include "archetype/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace arch {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument(
            "Matrix: data length " + std::to_string(data_.size()) +
            " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::col(std::size_t j) const {
    return std::vector<double>(col_data(j), col_data(j) + rows_);
}

void Matrix::set_col(std::size_t j, const std::vector<double>& v) {
    if (v.size() != rows_) {
        throw std::invalid_argument("Matrix::set_col: length mismatch");
    }
    std::copy(v.begin(), v.end(), col_data(j));
}

bool Matrix::is_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void Matrix::require_finite(const char* what) const {
    if (!is_finite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument(
            "matmul: inner dimensions differ (" + std::to_string(a.cols()) +
            " vs " + std::to_string(b.rows()) + ")");
    }
    a.require_finite("matmul lhs");
    b.require_finite("matmul rhs");
    Matrix r(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    // Column-major axpy ordering; the k-loop fixes the summation order.
    for (std::size_t j = 0; j < n; ++j) {
        double* rj = r.col_data(j);
        for (std::size_t p = 0; p < k; ++p) {
            const double bpj = b(p, j);
            if (bpj == 0.0) continue;
            const double* ap = a.col_data(p);
            for (std::size_t i = 0; i < m; ++i) rj[i] += ap[i] * bpj;
        }
    }
    return r;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) t(j, i) = m(i, j);
    return t;
}

double frobenius_norm_sq(const Matrix& m) {
    double s = 0.0;
    for (double x : m.data()) s += x * x;
    return s;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (v.size() != m.cols()) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    std::vector<double> r(m.rows(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double vj = v[j];
        if (vj == 0.0) continue;
        const double* cj = m.col_data(j);
        for (std::size_t i = 0; i < m.rows(); ++i) r[i] += cj[i] * vj;
    }
    return r;
}

std::vector<double> tmatvec(const Matrix& m, const std::vector<double>& v) {
    if (v.size() != m.rows()) {
        throw std::invalid_argument("tmatvec: dimension mismatch");
    }
    std::vector<double> r(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double* cj = m.col_data(j);
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += cj[i] * v[i];
        r[j] = s;
    }
    return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2_sq(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

namespace {

double offdiag_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

SymEig sym_eig(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("sym_eig: matrix is not square");
    }
    m.require_finite("sym_eig");
    const std::size_t n = m.rows();

    double max_abs = 0.0, max_asym = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            max_abs = std::max(max_abs, std::abs(m(i, j)));
            max_asym = std::max(max_asym, std::abs(m(i, j) - m(j, i)));
        }
    }
    if (max_asym > 1e-12 * std::max(1.0, max_abs)) {
        throw std::invalid_argument("sym_eig: input exceeds symmetry tolerance 1e-12");
    }

    Matrix a(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = 0.5 * (m(i, j) + m(j, i));
    Matrix v = Matrix::identity(n);

    const double fro = std::sqrt(frobenius_norm_sq(a));
    const double off_tol = 1e-12 * std::max(fro, 1e-300);
    const int max_sweeps = 100;

    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        if (offdiag_norm(a) <= off_tol) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // a <- Jᵀ a J on rows/cols p,q
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (!converged && offdiag_norm(a) > off_tol) {
        throw std::runtime_error(
            "sym_eig: Jacobi did not converge in 100 sweeps, off-diagonal residual " +
            std::to_string(offdiag_norm(a)));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i) > a(j, j);
    });

    SymEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

}  // namespace arch
