#pragma once

#include "tgcn/matrix.hpp"

namespace tgcn {

// Invertible T x T mixing matrix with its inverse computed once and cached.
class MixingMatrix {
public:
    // General invertible matrix; inverse via LU.
    explicit MixingMatrix(Matrix m);

    static MixingMatrix identity(int size);

    int size() const { return m_.rows; }
    const Matrix& m() const { return m_; }
    const Matrix& m_inv() const { return m_inv_; }

    bool lower_triangular() const { return lower_triangular_; }

    // max |(m * m_inv - I)_ij|
    double inverse_residual() const;

private:
    MixingMatrix() = default;
    Matrix m_;
    Matrix m_inv_;
    bool lower_triangular_ = false;

    friend MixingMatrix banded_mixing_matrix(int size, int bandwidth);
};

// Lower-triangular banded averaging matrix: row t (1-based) has value
// 1/min(b, t) on columns max(1, t-b+1)..t and zeros elsewhere, so each row
// sums to 1 and each transformed slice is an average of the current and up to
// b-1 preceding slices. Inverse by forward substitution.
MixingMatrix banded_mixing_matrix(int size, int bandwidth);

}  // namespace tgcn
