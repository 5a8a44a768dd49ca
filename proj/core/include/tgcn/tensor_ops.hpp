#pragma once

#include <vector>

#include "tgcn/mixing.hpp"
#include "tgcn/sparse.hpp"
#include "tgcn/tensor3.hpp"

namespace tgcn {

// Mode-3 product with the mixing matrix: out(i,j,t) = sum_k M(t,k) x(i,j,k).
// With inverse set, the cached inverse is used instead, undoing the forward
// transform to ~1e-10.
Tensor3 m_transform(const Tensor3& x, const MixingMatrix& m, bool inverse = false);

// Per-slice matrix product: out slice t = x slice t * y slice t.
Tensor3 facewise_product(const Tensor3& x, const Tensor3& y);

// Sparse-slice variant: slices[t] * x slice t for each t. slices.size() must
// equal x.depth.
Tensor3 facewise_product(const std::vector<CsrMatrix>& slices, const Tensor3& x);

// Tensor-tensor product under m: transform both factors, multiply facewise,
// transform back.
Tensor3 m_product(const Tensor3& x, const Tensor3& y, const MixingMatrix& m);

// The product identity: its transform has every frontal slice equal to the
// n x n matrix identity.
Tensor3 identity_tensor(int n, int depth, const MixingMatrix& m);

// Transpose: transformed slices are transposed, result mapped back.
Tensor3 tensor_transpose(const Tensor3& x, const MixingMatrix& m);

// Tensor-tube product x * theta with theta a 1 x 1 x T tube: every tube of x
// is multiplied by theta under m. Equivalent to scaling transformed slice t
// by the scalar (theta transform)_t.
Tensor3 tube_product(const Tensor3& x, const Tensor3& theta, const MixingMatrix& m);

// Weighted sums of sparse slices with mixing-matrix rows: out[t] =
// sum_k M(t,k) slices[k]. This is the M-transform of a per-slice-sparse
// tensor; for a banded lower-triangular matrix each output slice touches at
// most `bandwidth` inputs.
std::vector<CsrMatrix> m_transform_sparse(const std::vector<CsrMatrix>& slices, const MixingMatrix& m,
                                          bool inverse = false);

}  // namespace tgcn
