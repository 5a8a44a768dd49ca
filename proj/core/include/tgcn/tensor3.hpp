#pragma once

#include <cstddef>
#include <vector>

#include "tgcn/matrix.hpp"

namespace tgcn {

// Dense real 3-way array, the carrier for adjacency, feature, weight and
// embedding tensors. Layout: column-major frontal slices stored contiguously,
// element (i, j, t) at index (t * cols + j) * rows + i. With that layout the
// mode-3 unfolding (tubes as columns, column index j * rows + i) of slice t is
// exactly the slice's own flat storage.
struct Tensor3 {
    int rows = 0;   // I
    int cols = 0;   // J
    int depth = 0;  // T

    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int i, int j, int t)
        : rows(i), cols(j), depth(t),
          v(static_cast<std::size_t>(i) * j * t, 0.0) {}

    std::size_t size() const { return v.size(); }
    std::size_t slice_size() const { return static_cast<std::size_t>(rows) * cols; }

    double& operator()(int i, int j, int t) {
        return v[(static_cast<std::size_t>(t) * cols + j) * rows + i];
    }
    double operator()(int i, int j, int t) const {
        return v[(static_cast<std::size_t>(t) * cols + j) * rows + i];
    }

    double* slice(int t) { return v.data() + slice_size() * t; }
    const double* slice(int t) const { return v.data() + slice_size() * t; }

    Matrix slice_matrix(int t) const;
    void set_slice(int t, const Matrix& m);

    bool same_shape(const Tensor3& o) const {
        return rows == o.rows && cols == o.cols && depth == o.depth;
    }

    // Throws NumericError if any entry is NaN or infinite.
    void ensure_finite(const char* what) const;
};

Tensor3 add(const Tensor3& a, const Tensor3& b);
Tensor3 subtract(const Tensor3& a, const Tensor3& b);

// Mode-3 unfolding: a depth x (rows*cols) matrix whose column j*rows+i is the
// tube (i, j, :).
Matrix unfold(const Tensor3& x);

// Inverse of unfold for the given dimensions.
Tensor3 fold(const Matrix& m, int rows, int cols, int depth);

// Square root of the sum of squared entries.
double frobenius_norm(const Tensor3& x);

// Frobenius norm of (a - b); shapes must match.
double frobenius_diff(const Tensor3& a, const Tensor3& b);

// frobenius_diff(a, b) / max(1, frobenius_norm(b))
double relative_error(const Tensor3& a, const Tensor3& b);

}  // namespace tgcn
