#include "tgcn/tensor_ops.hpp"

#include <cmath>

#include "tgcn/errors.hpp"

namespace tgcn {

Tensor3 m_transform(const Tensor3& x, const MixingMatrix& m, bool inverse) {
    if (x.depth != m.size()) throw ShapeError("m_transform: tensor depth differs from mixing matrix size");
    const Matrix& mat = inverse ? m.m_inv() : m.m();
    Tensor3 out(x.rows, x.cols, x.depth);
    // out slice t = sum_k mat(t,k) * x slice k; slice-wise axpy keeps the
    // access pattern contiguous.
    const std::size_t n = x.slice_size();
    for (int t = 0; t < x.depth; ++t) {
        double* dst = out.slice(t);
        for (int k = 0; k < x.depth; ++k) {
            const double w = mat(t, k);
            if (w == 0.0) continue;
            const double* src = x.slice(k);
            for (std::size_t e = 0; e < n; ++e) dst[e] += w * src[e];
        }
    }
    out.ensure_finite("m_transform");
    return out;
}

Tensor3 facewise_product(const Tensor3& x, const Tensor3& y) {
    if (x.cols != y.rows) throw ShapeError("facewise_product: inner dimensions differ");
    if (x.depth != y.depth) throw ShapeError("facewise_product: slice counts differ");
    Tensor3 out(x.rows, y.cols, x.depth);
    for (int t = 0; t < x.depth; ++t) {
        const double* a = x.slice(t);
        const double* b = y.slice(t);
        double* c = out.slice(t);
        for (int j = 0; j < y.cols; ++j) {
            double* cj = c + static_cast<std::size_t>(j) * x.rows;
            for (int l = 0; l < x.cols; ++l) {
                const double blj = b[static_cast<std::size_t>(j) * y.rows + l];
                if (blj == 0.0) continue;
                const double* al = a + static_cast<std::size_t>(l) * x.rows;
                for (int i = 0; i < x.rows; ++i) cj[i] += al[i] * blj;
            }
        }
    }
    out.ensure_finite("facewise_product");
    return out;
}

Tensor3 facewise_product(const std::vector<CsrMatrix>& slices, const Tensor3& x) {
    if (static_cast<int>(slices.size()) != x.depth)
        throw ShapeError("facewise_product: slice counts differ");
    if (slices.empty()) return Tensor3();
    const int rows = slices[0].rows;
    for (const CsrMatrix& s : slices)
        if (s.cols != x.rows || s.rows != rows)
            throw ShapeError("facewise_product: sparse slice shape mismatch");
    Tensor3 out(rows, x.cols, x.depth);
    for (int t = 0; t < x.depth; ++t) slices[t].multiply_dense(x.slice(t), x.cols, out.slice(t));
    out.ensure_finite("facewise_product");
    return out;
}

Tensor3 m_product(const Tensor3& x, const Tensor3& y, const MixingMatrix& m) {
    return m_transform(facewise_product(m_transform(x, m), m_transform(y, m)), m, true);
}

Tensor3 identity_tensor(int n, int depth, const MixingMatrix& m) {
    if (n < 1 || depth < 1) throw ShapeError("identity_tensor: dimensions must be positive");
    if (depth != m.size()) throw ShapeError("identity_tensor: depth differs from mixing matrix size");
    Tensor3 hat(n, n, depth);
    for (int t = 0; t < depth; ++t)
        for (int i = 0; i < n; ++i) hat(i, i, t) = 1.0;
    return m_transform(hat, m, true);
}

Tensor3 tensor_transpose(const Tensor3& x, const MixingMatrix& m) {
    Tensor3 hat = m_transform(x, m);
    Tensor3 hat_t(x.cols, x.rows, x.depth);
    for (int t = 0; t < x.depth; ++t)
        for (int j = 0; j < x.cols; ++j)
            for (int i = 0; i < x.rows; ++i) hat_t(j, i, t) = hat(i, j, t);
    return m_transform(hat_t, m, true);
}

Tensor3 tube_product(const Tensor3& x, const Tensor3& theta, const MixingMatrix& m) {
    if (theta.rows != 1 || theta.cols != 1) throw ShapeError("tube_product: theta must be 1 x 1 x T");
    if (theta.depth != x.depth) throw ShapeError("tube_product: depth mismatch");
    Tensor3 x_hat = m_transform(x, m);
    const Tensor3 th_hat = m_transform(theta, m);
    const std::size_t n = x.slice_size();
    for (int t = 0; t < x.depth; ++t) {
        const double w = th_hat(0, 0, t);
        double* s = x_hat.slice(t);
        for (std::size_t e = 0; e < n; ++e) s[e] *= w;
    }
    return m_transform(x_hat, m, true);
}

std::vector<CsrMatrix> m_transform_sparse(const std::vector<CsrMatrix>& slices, const MixingMatrix& m,
                                          bool inverse) {
    if (static_cast<int>(slices.size()) != m.size())
        throw ShapeError("m_transform_sparse: slice count differs from mixing matrix size");
    const Matrix& mat = inverse ? m.m_inv() : m.m();
    std::vector<CsrMatrix> out;
    out.reserve(slices.size());
    std::vector<const CsrMatrix*> parts;
    std::vector<double> coeffs;
    for (int t = 0; t < m.size(); ++t) {
        parts.clear();
        coeffs.clear();
        for (int k = 0; k < m.size(); ++k) {
            const double w = mat(t, k);
            if (w == 0.0) continue;
            parts.push_back(&slices[k]);
            coeffs.push_back(w);
        }
        if (parts.empty())
            out.emplace_back(slices[0].rows, slices[0].cols);
        else
            out.push_back(add_scaled(parts, coeffs));
    }
    return out;
}

}  // namespace tgcn
