#include "tgcn/mixing.hpp"

#include <cmath>

#include "tgcn/errors.hpp"

namespace tgcn {

namespace {

bool is_lower_triangular(const Matrix& m) {
    for (int j = 1; j < m.cols; ++j)
        for (int i = 0; i < j; ++i)
            if (m(i, j) != 0.0) return false;
    return true;
}

}  // namespace

MixingMatrix::MixingMatrix(Matrix m) {
    if (m.rows != m.cols || m.rows < 1) throw ShapeError("mixing matrix must be square and nonempty");
    lower_triangular_ = is_lower_triangular(m);
    m_inv_ = lower_triangular_ ? lower_triangular_invert(m) : lu_invert(m);
    m_ = std::move(m);
    if (inverse_residual() > 1e-10)
        throw NumericError("mixing matrix inverse residual exceeds 1e-10; matrix too ill-conditioned");
}

MixingMatrix MixingMatrix::identity(int size) { return MixingMatrix(Matrix::identity(size)); }

double MixingMatrix::inverse_residual() const {
    const Matrix p = matmul(m_, m_inv_);
    double worst = 0.0;
    for (int j = 0; j < p.cols; ++j)
        for (int i = 0; i < p.rows; ++i)
            worst = std::max(worst, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

MixingMatrix banded_mixing_matrix(int size, int bandwidth) {
    if (size < 1) throw ShapeError("banded_mixing_matrix: size must be >= 1");
    if (bandwidth < 1) throw ConfigError("banded_mixing_matrix: bandwidth must be >= 1");
    Matrix m(size, size);
    for (int t = 1; t <= size; ++t) {
        const int lo = std::max(1, t - bandwidth + 1);
        const double value = 1.0 / std::min(bandwidth, t);
        for (int k = lo; k <= t; ++k) m(t - 1, k - 1) = value;
    }
    MixingMatrix mm;
    mm.m_inv_ = lower_triangular_invert(m);
    mm.m_ = std::move(m);
    mm.lower_triangular_ = true;
    if (mm.inverse_residual() > 1e-10)
        throw NumericError("banded_mixing_matrix: inverse residual exceeds 1e-10");
    return mm;
}

}  // namespace tgcn
