#include "tgcn/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "tgcn/errors.hpp"

namespace tgcn {

CsrMatrix CsrMatrix::from_coo(int rows, int cols, std::vector<Coo> entries) {
    for (const Coo& e : entries)
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw ShapeError("from_coo: entry out of bounds");
    std::sort(entries.begin(), entries.end(), [](const Coo& a, const Coo& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    m.col_idx.reserve(entries.size());
    m.values.reserve(entries.size());
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < entries.size() && entries[i].row == r) {
            double v = entries[i].value;
            const int c = entries[i].col;
            ++i;
            while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
                v += entries[i].value;
                ++i;
            }
            m.col_idx.push_back(c);
            m.values.push_back(v);
        }
        m.row_ptr[r + 1] = static_cast<std::int64_t>(m.col_idx.size());
    }
    return m;
}

CsrMatrix CsrMatrix::from_dense(const Matrix& d, double drop_below) {
    std::vector<Coo> entries;
    for (int i = 0; i < d.rows; ++i)
        for (int j = 0; j < d.cols; ++j)
            if (std::abs(d(i, j)) > drop_below) entries.push_back({i, j, d(i, j)});
    return from_coo(d.rows, d.cols, std::move(entries));
}

Matrix CsrMatrix::to_dense() const {
    Matrix d(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col_idx[k]) = values[k];
    return d;
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t(cols, rows);
    t.col_idx.resize(values.size());
    t.values.resize(values.size());
    std::vector<std::int64_t> count(cols + 1, 0);
    for (int c : col_idx) ++count[c + 1];
    for (int c = 0; c < cols; ++c) count[c + 1] += count[c];
    t.row_ptr = count;
    for (int r = 0; r < rows; ++r)
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const std::int64_t pos = count[col_idx[k]]++;
            t.col_idx[pos] = r;
            t.values[pos] = values[k];
        }
    return t;
}

void CsrMatrix::multiply_dense(const double* x, int k, double* y) const {
    std::fill(y, y + static_cast<std::size_t>(rows) * k, 0.0);
    for (int c = 0; c < k; ++c) {
        const double* xc = x + static_cast<std::size_t>(c) * cols;
        double* yc = y + static_cast<std::size_t>(c) * rows;
        for (int r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::int64_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) s += values[i] * xc[col_idx[i]];
            yc[r] = s;
        }
    }
}

void CsrMatrix::multiply_dense_row(int r, const double* x, int k, double* out) const {
    for (int c = 0; c < k; ++c) {
        const double* xc = x + static_cast<std::size_t>(c) * cols;
        double s = 0.0;
        for (std::int64_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) s += values[i] * xc[col_idx[i]];
        out[c] = s;
    }
}

CsrMatrix symmetrize(const CsrMatrix& a) {
    if (a.rows != a.cols) throw ShapeError("symmetrize: matrix not square");
    const CsrMatrix at = a.transposed();
    return add_scaled({&a, &at}, {0.5, 0.5});
}

CsrMatrix add_scaled(const std::vector<const CsrMatrix*>& parts, const std::vector<double>& coeffs) {
    if (parts.empty() || parts.size() != coeffs.size())
        throw ShapeError("add_scaled: needs matching nonempty part/coefficient lists");
    const int rows = parts[0]->rows, cols = parts[0]->cols;
    for (const CsrMatrix* p : parts)
        if (p->rows != rows || p->cols != cols) throw ShapeError("add_scaled: shape mismatch");

    CsrMatrix out(rows, cols);
    std::vector<double> acc(cols, 0.0);
    std::vector<char> seen(cols, 0);
    std::vector<int> touched;
    for (int r = 0; r < rows; ++r) {
        touched.clear();
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const CsrMatrix& m = *parts[p];
            const double w = coeffs[p];
            for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
                const int c = m.col_idx[k];
                if (!seen[c]) {
                    seen[c] = 1;
                    acc[c] = 0.0;
                    touched.push_back(c);
                }
                acc[c] += w * m.values[k];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            out.col_idx.push_back(c);
            out.values.push_back(acc[c]);
            seen[c] = 0;
        }
        out.row_ptr[r + 1] = static_cast<std::int64_t>(out.col_idx.size());
    }
    return out;
}

CsrMatrix normalize_adjacency(const CsrMatrix& a) {
    if (a.rows != a.cols) throw ShapeError("normalize_adjacency: matrix not square");
    const int n = a.rows;
    std::vector<double> dinv_sqrt(n);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            if (a.values[k] < 0.0) throw DataError("normalize_adjacency: negative edge weight");
            s += a.values[k];
        }
        dinv_sqrt[r] = 1.0 / std::sqrt(1.0 + s);
    }
    // (a + I) scaled entrywise by dinv_sqrt[i] * dinv_sqrt[j].
    CsrMatrix out(n, n);
    out.col_idx.reserve(a.col_idx.size() + n);
    out.values.reserve(a.values.size() + n);
    for (int r = 0; r < n; ++r) {
        bool diag_emitted = false;
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            const int c = a.col_idx[k];
            double v = a.values[k];
            if (!diag_emitted && c >= r) {
                if (c == r) {
                    v += 1.0;
                } else {
                    out.col_idx.push_back(r);
                    out.values.push_back(dinv_sqrt[r] * dinv_sqrt[r]);
                }
                diag_emitted = true;
            }
            out.col_idx.push_back(c);
            out.values.push_back(v * dinv_sqrt[r] * dinv_sqrt[c]);
        }
        if (!diag_emitted) {
            out.col_idx.push_back(r);
            out.values.push_back(dinv_sqrt[r] * dinv_sqrt[r]);
        }
        out.row_ptr[r + 1] = static_cast<std::int64_t>(out.col_idx.size());
    }
    return out;
}

}  // namespace tgcn
