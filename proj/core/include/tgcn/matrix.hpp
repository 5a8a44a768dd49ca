#pragma once

#include <cstddef>
#include <vector>

namespace tgcn {

// Dense column-major matrix. Small sizes throughout (mixing matrices,
// weight slices, Vandermonde systems), so storage stays simple.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;  // element (i, j) at v[j * rows + i]

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return v[static_cast<std::size_t>(j) * rows + i]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(j) * rows + i]; }

    double* col(int j) { return v.data() + static_cast<std::size_t>(j) * rows; }
    const double* col(int j) const { return v.data() + static_cast<std::size_t>(j) * rows; }

    static Matrix identity(int n);

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

// c = a^T
Matrix transpose(const Matrix& m);

// General inverse via LU with partial pivoting. Throws NumericError on a
// numerically singular matrix.
Matrix lu_invert(const Matrix& m);

// Inverse of a lower-triangular matrix by forward substitution.
Matrix lower_triangular_invert(const Matrix& m);

// Largest singular value via power iteration on m^T m. Deterministic start
// vector; iterates until the Rayleigh quotient stabilizes.
double spectral_norm(const Matrix& m, int max_iters = 500, double tol = 1e-13);

// Least-squares solution of a x = b (a.rows >= a.cols) by Householder QR.
// Throws NumericError when a is rank deficient to working precision.
std::vector<double> qr_least_squares(const Matrix& a, const std::vector<double>& b);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace tgcn
