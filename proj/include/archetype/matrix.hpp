#pragma once

#include <cstddef>
#include <vector>

namespace arch {

/// Dense column-major matrix of doubles. Columns are contiguous so that
/// data points (stored one per column) can be handed around cheaply.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const {
        return data_[j * rows_ + i];
    }
    double& operator()(std::size_t i, std::size_t j) {
        return data_[j * rows_ + i];
    }

    const double* col_data(std::size_t j) const { return data_.data() + j * rows_; }
    double* col_data(std::size_t j) { return data_.data() + j * rows_; }

    std::vector<double> col(std::size_t j) const;
    void set_col(std::size_t j, const std::vector<double>& v);

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool is_finite() const;
    // Throws std::invalid_argument naming `what` if any entry is NaN/Inf.
    void require_finite(const char* what) const;

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Eigendecomposition of a symmetric matrix: M = V diag(eigenvalues) Vᵀ,
/// eigenvalues sorted descending, V orthonormal.
struct SymEig {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

// Product a·b with a fixed summation order (deterministic across platforms).
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// Sum of squared entries.
double frobenius_norm_sq(const Matrix& m);

// Symmetric eigendecomposition by cyclic Jacobi rotations. The input must be
// square and symmetric to 1e-12 (it is symmetrized before decomposing).
// Intended for small matrices (up to a few hundred rows). Throws
// std::runtime_error if the sweep cap (100) is hit before the off-diagonal
// mass falls below 1e-12 relative to the Frobenius norm.
SymEig sym_eig(const Matrix& m);

// m·v and mᵀ·v for plain vectors.
std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);
std::vector<double> tmatvec(const Matrix& m, const std::vector<double>& v);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2_sq(const std::vector<double>& a);

}  // namespace arch
