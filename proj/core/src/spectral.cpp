#include "tgcn/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgcn/errors.hpp"

namespace tgcn {

namespace {

void fix_eigenvector_signs(Matrix& vecs) {
    for (int c = 0; c < vecs.cols; ++c) {
        double* col = vecs.col(c);
        double biggest = 0.0;
        for (int i = 0; i < vecs.rows; ++i) biggest = std::max(biggest, std::abs(col[i]));
        const double cutoff = 1e-12 * biggest;
        for (int i = 0; i < vecs.rows; ++i) {
            if (std::abs(col[i]) > cutoff) {
                if (col[i] < 0.0)
                    for (int k = 0; k < vecs.rows; ++k) col[k] = -col[k];
                break;
            }
        }
    }
}

double off_diagonal_frobenius(const Matrix& a) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j)
        for (int i = 0; i < a.rows; ++i)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (double x : a.v) s += x * x;
    return std::sqrt(s);
}

double max_asymmetry(const Matrix& a) {
    double worst = 0.0;
    for (int j = 0; j < a.cols; ++j)
        for (int i = 0; i < j; ++i) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    return worst;
}

double max_abs(const Matrix& a) {
    double worst = 0.0;
    for (double x : a.v) worst = std::max(worst, std::abs(x));
    return worst;
}

std::vector<double> lapack_eigenvalues(Matrix a) {
    std::vector<double> w(a.rows);
    const lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', a.rows, a.v.data(), a.rows, w.data());
    if (info != 0) throw NumericError("dsyev failed, info=" + std::to_string(info));
    return w;
}

}  // namespace

Tensor3 AdjacencyTensor::to_dense() const {
    if (slices.empty()) return Tensor3();
    Tensor3 out(slices[0].rows, slices[0].cols, depth());
    for (int t = 0; t < depth(); ++t) out.set_slice(t, slices[t].to_dense());
    return out;
}

SymmetricEig jacobi_eigh(const Matrix& a_in) {
    if (a_in.rows != a_in.cols) throw ShapeError("jacobi_eigh: matrix not square");
    const int n = a_in.rows;
    Matrix a = a_in;
    Matrix v = Matrix::identity(n);
    const double threshold = 1e-12 * frobenius(a);
    constexpr int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_frobenius(a) <= threshold) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double rho = s / (1.0 + c);

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p);
                        const double arq = a(r, q);
                        a(r, p) = a(p, r) = arp - s * (arq + rho * arp);
                        a(r, q) = a(q, r) = arq + s * (arp - rho * arq);
                    }
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + rho * vrp);
                    v(r, q) = vrq + s * (vrp - rho * vrq);
                }
            }
        }
    }

    SymmetricEig eig;
    eig.values.resize(n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    eig.vectors = Matrix(n, n);
    for (int c = 0; c < n; ++c) {
        eig.values[c] = a(order[c], order[c]);
        for (int r = 0; r < n; ++r) eig.vectors(r, c) = v(r, order[c]);
    }
    fix_eigenvector_signs(eig.vectors);
    return eig;
}

std::vector<double> symmetric_eigenvalues(const Matrix& a) {
    if (a.rows >= dense_solver_threshold) return lapack_eigenvalues(a);
    return jacobi_eigh(a).values;
}

TensorEig tensor_eig(const Tensor3& x, const MixingMatrix& m) {
    if (x.rows != x.cols) throw ShapeError("tensor_eig: slices must be square");
    const Tensor3 x_hat = m_transform(x, m);
    const int n = x.rows, depth = x.depth;

    TensorEig eig;
    eig.q_hat = Tensor3(n, n, depth);
    Tensor3 d_hat(n, n, depth);
    eig.eigenvalues = Matrix(n, depth);

    for (int t = 0; t < depth; ++t) {
        Matrix slice = x_hat.slice_matrix(t);
        if (max_asymmetry(slice) > 1e-8 * std::max(1.0, max_abs(slice)))
            throw NumericError("tensor_eig: transformed slice " + std::to_string(t) + " is not symmetric");
        // Exact symmetrization stabilizes the rotations against roundoff in
        // the transform itself.
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < j; ++i) {
                const double v = 0.5 * (slice(i, j) + slice(j, i));
                slice(i, j) = v;
                slice(j, i) = v;
            }
        const SymmetricEig se = jacobi_eigh(slice);
        eig.q_hat.set_slice(t, se.vectors);
        for (int i = 0; i < n; ++i) {
            d_hat(i, i, t) = se.values[i];
            eig.eigenvalues(i, t) = se.values[i];
        }
    }
    eig.q = m_transform(eig.q_hat, m, true);
    eig.d = m_transform(d_hat, m, true);
    return eig;
}

Tensor3 laplacian_tensor(const AdjacencyTensor& a, const MixingMatrix& m) {
    if (!a.normalized) throw DataError("laplacian_tensor: adjacency must be normalized first");
    if (a.depth() != m.size()) throw ShapeError("laplacian_tensor: depth differs from mixing matrix size");
    return subtract(identity_tensor(a.node_count(), a.depth(), m), a.to_dense());
}

Tensor3 graph_fourier(const Tensor3& x, const TensorEig& eig, const MixingMatrix& m) {
    return m_product(tensor_transpose(eig.q, m), x, m);
}

Tensor3 graph_fourier_inverse(const Tensor3& x, const TensorEig& eig, const MixingMatrix& m) {
    return m_product(eig.q, x, m);
}

Tensor3 spectral_filter(const Tensor3& x, const TensorEig& eig, const TransformedScalarFn& f,
                        const MixingMatrix& m) {
    const int n = eig.q_hat.rows;
    if (x.rows != n) throw ShapeError("spectral_filter: signal row count mismatch");
    const Tensor3 x_hat = m_transform(x, m);
    Tensor3 out_hat(n, x.cols, x.depth);
    for (int t = 0; t < x.depth; ++t) {
        const Matrix q = eig.q_hat.slice_matrix(t);
        Matrix proj = matmul(transpose(q), x_hat.slice_matrix(t));  // q^T x
        for (int j = 0; j < proj.cols; ++j)
            for (int i = 0; i < n; ++i) proj(i, j) *= f(t, eig.eigenvalues(i, t));
        out_hat.set_slice(t, matmul(q, proj));
    }
    return m_transform(out_hat, m, true);
}

TubalPolyFit fit_tubal_polynomial(const TransformedScalarFn& f, const TensorEig& eig, int degree,
                                  const MixingMatrix& m) {
    if (degree < 0) throw ConfigError("fit_tubal_polynomial: degree must be >= 0");
    const int n = eig.eigenvalues.rows;
    const int depth = eig.eigenvalues.cols;

    TubalPolyFit fit;
    fit.poly.degree = degree;
    fit.poly.coeffs_transformed = Matrix(degree + 1, depth);

    for (int t = 0; t < depth; ++t) {
        // Collapse duplicate eigenvalues; keep multiplicities as weights.
        std::vector<double> lambda, weight;
        for (int i = 0; i < n; ++i) {
            const double x = eig.eigenvalues(i, t);
            if (!lambda.empty() && std::abs(x - lambda.back()) <= 1e-12 * std::max(1.0, std::abs(x))) {
                weight.back() += 1.0;
            } else {
                lambda.push_back(x);
                weight.push_back(1.0);
            }
        }
        const int distinct = static_cast<int>(lambda.size());
        const int k_eff = std::min(degree, distinct - 1);

        Matrix vand(distinct, k_eff + 1);
        std::vector<double> rhs(distinct);
        for (int i = 0; i < distinct; ++i) {
            const double w = std::sqrt(weight[i]);
            double p = 1.0;
            for (int k = 0; k <= k_eff; ++k) {
                vand(i, k) = w * p;
                p *= lambda[i];
            }
            rhs[i] = w * f(t, lambda[i]);
        }
        const std::vector<double> coef = qr_least_squares(vand, rhs);
        for (int k = 0; k <= degree; ++k)
            fit.poly.coeffs_transformed(k, t) = k <= k_eff ? coef[k] : 0.0;
    }

    // Residual on the diagonal tubes, in both spaces.
    Tensor3 resid_hat(n, n, depth);
    double sq = 0.0;
    for (int t = 0; t < depth; ++t)
        for (int i = 0; i < n; ++i) {
            const double lam = eig.eigenvalues(i, t);
            double p = 0.0, x = 1.0;
            for (int k = 0; k <= degree; ++k) {
                p += fit.poly.coeffs_transformed(k, t) * x;
                x *= lam;
            }
            const double r = f(t, lam) - p;
            resid_hat(i, i, t) = r;
            sq += r * r;
        }
    fit.error_transformed = std::sqrt(sq);
    fit.error = frobenius_norm(m_transform(resid_hat, m, true));

    fit.poly.thetas.reserve(degree + 1);
    for (int k = 0; k <= degree; ++k) {
        Tensor3 tube(1, 1, depth);
        for (int t = 0; t < depth; ++t) tube(0, 0, t) = fit.poly.coeffs_transformed(k, t);
        fit.poly.thetas.push_back(m_transform(tube, m, true));
    }
    return fit;
}

Tensor3 apply_polynomial_filter(const Tensor3& x, const Tensor3& l, const TubalPolynomial& poly,
                                const MixingMatrix& m) {
    if (static_cast<int>(poly.thetas.size()) != poly.degree + 1)
        throw ShapeError("apply_polynomial_filter: coefficient count mismatch");
    Tensor3 acc = tube_product(x, poly.thetas[poly.degree], m);
    for (int k = poly.degree - 1; k >= 0; --k)
        acc = add(m_product(l, acc, m), tube_product(x, poly.thetas[k], m));
    return acc;
}

Tensor3 degree_one_filter(const AdjacencyTensor& a, const Tensor3& x, const Tensor3& theta,
                          const MixingMatrix& m) {
    if (x.cols != theta.rows) throw ShapeError("degree_one_filter: feature/coefficient mismatch");
    const std::vector<CsrMatrix> a_hat = m_transform_sparse(a.slices, m);
    const Tensor3 z_hat = facewise_product(a_hat, m_transform(x, m));
    return m_transform(facewise_product(z_hat, m_transform(theta, m)), m, true);
}

SpectralBoundReport spectral_bound_check(const AdjacencyTensor& a, const MixingMatrix& m) {
    if (!a.normalized) throw DataError("spectral_bound_check: adjacency must be normalized first");
    if (a.depth() != m.size()) throw ShapeError("spectral_bound_check: depth differs from mixing matrix size");
    SpectralBoundReport rep;
    rep.nodes = a.node_count();
    rep.depth = a.depth();
    rep.solver = rep.nodes >= dense_solver_threshold ? "dsyev" : "jacobi";

    rep.banded_mixing = m.lower_triangular();
    for (int t = 0; rep.banded_mixing && t < m.size(); ++t) {
        double row_sum = 0.0;
        for (int k = 0; k < m.size(); ++k) {
            if (m.m()(t, k) < 0.0) rep.banded_mixing = false;
            row_sum += m.m()(t, k);
        }
        if (std::abs(row_sum - 1.0) > 1e-12) rep.banded_mixing = false;
    }

    const std::vector<CsrMatrix> a_hat = m_transform_sparse(a.slices, m);
    rep.symmetric_input = true;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    rep.max_eigenvalue = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < rep.depth; ++t) {
        Matrix slice = a_hat[t].to_dense();
        // Transformed Laplacian slice: I - transformed adjacency slice.
        for (int j = 0; j < slice.cols; ++j)
            for (int i = 0; i < slice.rows; ++i) slice(i, j) = (i == j ? 1.0 : 0.0) - slice(i, j);
        if (max_asymmetry(slice) > 1e-8 * std::max(1.0, max_abs(slice))) rep.symmetric_input = false;
        for (int j = 0; j < slice.cols; ++j)
            for (int i = 0; i < j; ++i) {
                const double v = 0.5 * (slice(i, j) + slice(j, i));
                slice(i, j) = v;
                slice(j, i) = v;
            }
        const std::vector<double> w = symmetric_eigenvalues(slice);
        const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
        rep.per_slice.emplace_back(*lo, *hi);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, *lo);
        rep.max_eigenvalue = std::max(rep.max_eigenvalue, *hi);
    }
    rep.asserted = rep.symmetric_input && rep.banded_mixing;
    rep.within_bounds = rep.min_eigenvalue >= -1e-8 && rep.max_eigenvalue <= 2.0 + 1e-8;
    return rep;
}

}  // namespace tgcn
