#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tgcn/mixing.hpp"
#include "tgcn/sparse.hpp"
#include "tgcn/tensor3.hpp"
#include "tgcn/tensor_ops.hpp"

namespace tgcn {

// Per-slice-sparse N x N x T adjacency stack with processing flags.
struct AdjacencyTensor {
    std::vector<CsrMatrix> slices;
    bool normalized = false;
    bool symmetrized = false;

    int node_count() const { return slices.empty() ? 0 : slices[0].rows; }
    int depth() const { return static_cast<int>(slices.size()); }
    Tensor3 to_dense() const;
};

// Eigendecomposition of a symmetric matrix. Eigenvalues ascending;
// each eigenvector's first component of magnitude > 1e-12 * max|component|
// is made positive so repeated runs are bit-identical.
struct SymmetricEig {
    std::vector<double> values;
    Matrix vectors;  // column n is the eigenvector of values[n]
};

// Cyclic Jacobi rotations, off-diagonal Frobenius threshold
// 1e-12 * ||input||_F, at most 100 sweeps. Input must be symmetric.
SymmetricEig jacobi_eigh(const Matrix& a);

// Eigenvalues only. Uses Jacobi below `dense_solver_threshold` rows and
// LAPACK dsyev above it (the Jacobi route is quadratic per sweep per row and
// becomes impractical for the dataset-scale slices).
std::vector<double> symmetric_eigenvalues(const Matrix& a);
inline constexpr int dense_solver_threshold = 128;

// Result of the per-transformed-slice eigendecomposition x = q * d * q^T.
struct TensorEig {
    Tensor3 q;  // orthogonal under the product
    Tensor3 d;  // every transformed slice diagonal
    // Caches in the transformed space (what the factor slices were built from).
    Tensor3 q_hat;
    Matrix eigenvalues;  // (n, t) = t-th transformed slice's n-th eigenvalue, ascending
};

// Decomposes x given that every transformed slice is symmetric (checked to
// 1e-8, scaled by the slice magnitude; throws otherwise).
TensorEig tensor_eig(const Tensor3& x, const MixingMatrix& m);

// identity_tensor(n, t, m) - a, densified. Requires a.normalized.
Tensor3 laplacian_tensor(const AdjacencyTensor& a, const MixingMatrix& m);

// q^T * x and q * x.
Tensor3 graph_fourier(const Tensor3& x, const TensorEig& eig, const MixingMatrix& m);
Tensor3 graph_fourier_inverse(const Tensor3& x, const TensorEig& eig, const MixingMatrix& m);

// Filter acting elementwise on transformed eigenvalues: slice t of the result
// is q_hat_t diag(f(t, lambda)) q_hat_t^T x_hat_t, mapped back.
using TransformedScalarFn = std::function<double(int t, double lambda)>;
Tensor3 spectral_filter(const Tensor3& x, const TensorEig& eig, const TransformedScalarFn& f,
                        const MixingMatrix& m);

// Degree-K polynomial with tubal coefficients.
struct TubalPolynomial {
    int degree = 0;
    std::vector<Tensor3> thetas;      // K+1 tubes, 1 x 1 x T each
    Matrix coeffs_transformed;        // (k, t) = transformed coefficient k of slice t
};

struct TubalPolyFit {
    TubalPolynomial poly;
    double error = 0.0;              // || f applied to d - polynomial in d ||_F
    double error_transformed = 0.0;  // same residual measured in the transformed space
};

// Least-squares fit of f on each transformed slice's eigenvalue set
// (multiplicity-weighted; duplicate eigenvalues collapse the effective degree
// instead of failing). A numerically singular system among distinct
// eigenvalues still throws NumericError.
TubalPolyFit fit_tubal_polynomial(const TransformedScalarFn& f, const TensorEig& eig, int degree,
                                  const MixingMatrix& m);

// Horner evaluation sum_k l^(star k) * theta_k * x using only products with l
// (no eigendecomposition involved).
Tensor3 apply_polynomial_filter(const Tensor3& x, const Tensor3& l, const TubalPolynomial& poly,
                                const MixingMatrix& m);

// a * x * theta for a full F x F' x T coefficient tensor; the degree-one
// filter collapsed onto the adjacency stack. Matches the single-layer model
// forward when theta's transformed slices are all equal.
Tensor3 degree_one_filter(const AdjacencyTensor& a, const Tensor3& x, const Tensor3& theta,
                          const MixingMatrix& m);

// Range of the transformed Laplacian spectrum across all slices.
struct SpectralBoundReport {
    int nodes = 0;
    int depth = 0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool symmetric_input = false;  // every transformed slice symmetric
    bool banded_mixing = false;    // rows sum to 1 with nonnegative entries
    bool asserted = false;         // bound is a theorem only under the two flags above
    bool within_bounds = false;    // min >= -1e-8 and max <= 2 + 1e-8
    std::string solver;
    std::vector<std::pair<double, double>> per_slice;  // (min, max) per slice

    bool failed() const { return asserted && !within_bounds; }
};

// Eigenvalue range of I - (a transformed) per slice; a must be normalized.
SpectralBoundReport spectral_bound_check(const AdjacencyTensor& a, const MixingMatrix& m);

}  // namespace tgcn
