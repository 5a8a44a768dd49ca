#include "tgcn/tensor3.hpp"

#include <cmath>
#include <string>

#include "tgcn/errors.hpp"

namespace tgcn {

Matrix Tensor3::slice_matrix(int t) const {
    Matrix m(rows, cols);
    const double* s = slice(t);
    std::copy(s, s + slice_size(), m.v.begin());
    return m;
}

void Tensor3::set_slice(int t, const Matrix& m) {
    if (m.rows != rows || m.cols != cols) throw ShapeError("set_slice: slice shape mismatch");
    std::copy(m.v.begin(), m.v.end(), slice(t));
}

void Tensor3::ensure_finite(const char* what) const {
    for (double x : v)
        if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite entry");
}

Tensor3 add(const Tensor3& a, const Tensor3& b) {
    if (!a.same_shape(b)) throw ShapeError("add: shape mismatch");
    Tensor3 out = a;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
    return out;
}

Tensor3 subtract(const Tensor3& a, const Tensor3& b) {
    if (!a.same_shape(b)) throw ShapeError("subtract: shape mismatch");
    Tensor3 out = a;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.v[i];
    return out;
}

Matrix unfold(const Tensor3& x) {
    Matrix m(x.depth, x.rows * x.cols);
    // Row t of the unfolding is slice t's flat storage.
    for (int t = 0; t < x.depth; ++t) {
        const double* s = x.slice(t);
        for (std::size_t c = 0; c < x.slice_size(); ++c) m(t, static_cast<int>(c)) = s[c];
    }
    return m;
}

Tensor3 fold(const Matrix& m, int rows, int cols, int depth) {
    if (m.rows != depth || m.cols != rows * cols)
        throw ShapeError("fold: matrix shape inconsistent with target dimensions");
    Tensor3 x(rows, cols, depth);
    for (int t = 0; t < depth; ++t) {
        double* s = x.slice(t);
        for (std::size_t c = 0; c < x.slice_size(); ++c) s[c] = m(t, static_cast<int>(c));
    }
    return x;
}

double frobenius_norm(const Tensor3& x) {
    double s = 0.0;
    for (double e : x.v) s += e * e;
    return std::sqrt(s);
}

double frobenius_diff(const Tensor3& a, const Tensor3& b) {
    if (!a.same_shape(b)) throw ShapeError("frobenius_diff: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double relative_error(const Tensor3& a, const Tensor3& b) {
    return frobenius_diff(a, b) / std::max(1.0, frobenius_norm(b));
}

}  // namespace tgcn
