#pragma once

#include <cstdint>
#include <vector>

#include "tgcn/matrix.hpp"

namespace tgcn {

struct Coo {
    int row;
    int col;
    double value;
};

// Compressed sparse row matrix with column indices sorted within each row.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::int64_t> row_ptr;  // length rows + 1
    std::vector<int> col_idx;
    std::vector<double> values;

    CsrMatrix() = default;
    CsrMatrix(int r, int c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

    std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

    // Duplicate (row, col) entries are summed. Input order is irrelevant;
    // the result is canonical (sorted columns per row).
    static CsrMatrix from_coo(int rows, int cols, std::vector<Coo> entries);

    static CsrMatrix from_dense(const Matrix& m, double drop_below = 0.0);
    Matrix to_dense() const;

    CsrMatrix transposed() const;

    // y (rows x k, column-major) = this * x (cols x k, column-major)
    void multiply_dense(const double* x, int k, double* y) const;

    // Single output row of this * x: out[0..k) = row r of the product.
    void multiply_dense_row(int r, const double* x, int k, double* out) const;
};

// 1/2 (a + a^T)
CsrMatrix symmetrize(const CsrMatrix& a);

// Weighted sum of structurally distinct CSR matrices of identical shape:
// sum_i coeff[i] * parts[i]. Column order stays sorted; exact zeros produced
// by cancellation are kept so the sparsity pattern is input-independent.
CsrMatrix add_scaled(const std::vector<const CsrMatrix*>& parts, const std::vector<double>& coeffs);

// Degree-normalized adjacency with self loops: with d_i = 1 + sum_j a_ij,
// returns diag(d)^{-1/2} (a + I) diag(d)^{-1/2}. Entries must be nonnegative.
CsrMatrix normalize_adjacency(const CsrMatrix& a);

}  // namespace tgcn
