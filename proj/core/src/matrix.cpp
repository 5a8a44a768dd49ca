#include "tgcn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "tgcn/errors.hpp"

namespace tgcn {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw ShapeError("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    // Column-major: build each output column as a linear combination of a's columns.
    for (int j = 0; j < b.cols; ++j) {
        double* cj = c.col(j);
        for (int l = 0; l < a.cols; ++l) {
            const double blj = b(l, j);
            if (blj == 0.0) continue;
            const double* al = a.col(l);
            for (int i = 0; i < a.rows; ++i) cj[i] += al[i] * blj;
        }
    }
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < m.rows; ++i) t(j, i) = m(i, j);
    return t;
}

Matrix lu_invert(const Matrix& m) {
    if (m.rows != m.cols) throw ShapeError("lu_invert: matrix not square");
    const int n = m.rows;
    Matrix a = m;                    // in-place LU factors
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double cand = std::abs(a(i, k));
            if (cand > best) { best = cand; p = i; }
        }
        if (best == 0.0) throw NumericError("lu_invert: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(piv[k], piv[p]);
        }
        const double pivot = a(k, k);
        for (int i = k + 1; i < n; ++i) {
            a(i, k) /= pivot;
            const double lik = a(i, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }

    Matrix inv(n, n);
    std::vector<double> x(n);
    for (int c = 0; c < n; ++c) {
        // Solve A x = e_c using the pivoted factors.
        for (int i = 0; i < n; ++i) x[i] = (piv[i] == c) ? 1.0 : 0.0;
        for (int i = 1; i < n; ++i) {
            double s = x[i];
            for (int j = 0; j < i; ++j) s -= a(i, j) * x[j];
            x[i] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[i];
            for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
            x[i] = s / a(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, c) = x[i];
    }
    return inv;
}

Matrix lower_triangular_invert(const Matrix& m) {
    if (m.rows != m.cols) throw ShapeError("lower_triangular_invert: matrix not square");
    const int n = m.rows;
    for (int i = 0; i < n; ++i)
        if (m(i, i) == 0.0) throw NumericError("lower_triangular_invert: zero diagonal");
    Matrix inv(n, n);
    for (int c = 0; c < n; ++c) {
        inv(c, c) = 1.0 / m(c, c);
        for (int i = c + 1; i < n; ++i) {
            double s = 0.0;
            for (int j = c; j < i; ++j) s += m(i, j) * inv(j, c);
            inv(i, c) = -s / m(i, i);
        }
    }
    return inv;
}

double spectral_norm(const Matrix& m, int max_iters, double tol) {
    const int n = m.cols;
    if (n == 0 || m.rows == 0) return 0.0;
    std::vector<double> x(n), y(m.rows), z(n);
    for (int i = 0; i < n; ++i) x[i] = 1.0 / std::sqrt(static_cast<double>(n));
    double prev = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        // y = m x
        for (int i = 0; i < m.rows; ++i) y[i] = 0.0;
        for (int j = 0; j < n; ++j) {
            const double xj = x[j];
            const double* cj = m.col(j);
            for (int i = 0; i < m.rows; ++i) y[i] += cj[i] * xj;
        }
        // z = m^T y
        for (int j = 0; j < n; ++j) {
            const double* cj = m.col(j);
            double s = 0.0;
            for (int i = 0; i < m.rows; ++i) s += cj[i] * y[i];
            z[j] = s;
        }
        double nrm = 0.0;
        for (int j = 0; j < n; ++j) nrm += z[j] * z[j];
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        const double sigma = std::sqrt(nrm);
        for (int j = 0; j < n; ++j) x[j] = z[j] / nrm;
        if (it > 0 && std::abs(sigma - prev) <= tol * std::max(1.0, sigma)) return sigma;
        prev = sigma;
    }
    return prev;
}

std::vector<double> qr_least_squares(const Matrix& a_in, const std::vector<double>& b_in) {
    if (static_cast<int>(b_in.size()) != a_in.rows)
        throw ShapeError("qr_least_squares: rhs length mismatch");
    if (a_in.rows < a_in.cols)
        throw ShapeError("qr_least_squares: underdetermined system");
    Matrix a = a_in;
    std::vector<double> b = b_in;
    const int m = a.rows, n = a.cols;

    for (int k = 0; k < n; ++k) {
        // Householder reflector for column k.
        double norm = 0.0;
        for (int i = k; i < m; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw NumericError("qr_least_squares: rank deficient");
        if (a(k, k) > 0) norm = -norm;
        for (int i = k; i < m; ++i) a(i, k) /= norm;
        a(k, k) -= 1.0;  // column k now holds v with v_k = a_kk/norm - 1

        for (int j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (int i = k; i < m; ++i) s += a(i, k) * a(i, j);
            s /= a(k, k);
            for (int i = k; i < m; ++i) a(i, j) += s * a(i, k);
        }
        double s = 0.0;
        for (int i = k; i < m; ++i) s += a(i, k) * b[i];
        s /= a(k, k);
        for (int i = k; i < m; ++i) b[i] += s * a(i, k);
        a(k, k) = norm;  // R diagonal
    }

    // Relative rank test on R's diagonal.
    double dmax = 0.0;
    for (int k = 0; k < n; ++k) dmax = std::max(dmax, std::abs(a(k, k)));
    for (int k = 0; k < n; ++k)
        if (std::abs(a(k, k)) <= 1e-13 * dmax)
            throw NumericError("qr_least_squares: numerically singular system");

    std::vector<double> x(n);
    for (int k = n - 1; k >= 0; --k) {
        double s = b[k];
        for (int j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) d = std::max(d, std::abs(a.v[i] - b.v[i]));
    return d;
}

}  // namespace tgcn
