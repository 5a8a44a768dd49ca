#include "tgcn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "tgcn/errors.hpp"
#include "tgcn/experiment.hpp"
#include "tgcn/rng.hpp"
#include "tgcn/spectral.hpp"
#include "tgcn/tensor_ops.hpp"

namespace tgcn {

namespace {

Tensor3 rand_tensor(Rng& rng, int i, int j, int t, double lo = -1.0, double hi = 1.0) {
    Tensor3 x(i, j, t);
    for (double& v : x.v) v = rng.uniform(lo, hi);
    return x;
}

MixingMatrix rand_invertible_mixing(Rng& rng, int t) {
    Matrix m(t, t);
    for (double& v : m.v) v = rng.uniform(-1.0, 1.0);
    // Diagonal dominance guarantees invertibility and a tame inverse.
    for (int i = 0; i < t; ++i) {
        double row = 0.0;
        for (int j = 0; j < t; ++j) row += std::abs(m(i, j));
        m(i, i) += row + 0.5;
    }
    return MixingMatrix(std::move(m));
}

MixingMatrix rand_mixing(Rng& rng, int t) {
    if (rng.uniform() < 0.5) return banded_mixing_matrix(t, rng.range(1, t));
    return rand_invertible_mixing(rng, t);
}

Tensor3 rand_symmetric_slices(Rng& rng, int n, int t) {
    Tensor3 x(n, n, t);
    for (int s = 0; s < t; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v = rng.uniform(-1.0, 1.0);
                x(i, j, s) = v;
                x(j, i, s) = v;
            }
    return x;
}

// Random undirected binary graphs per slice, normalized.
AdjacencyTensor rand_graph_adjacency(Rng& rng, int n, int t, double density) {
    AdjacencyTensor a;
    a.symmetrized = true;
    for (int s = 0; s < t; ++s) {
        std::vector<Coo> entries;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                if (rng.uniform() < density) {
                    entries.push_back({i, j, 1.0});
                    entries.push_back({j, i, 1.0});
                }
        a.slices.push_back(
            normalize_adjacency(CsrMatrix::from_coo(n, n, std::move(entries))));
    }
    a.normalized = true;
    return a;
}

Tensor3 naive_facewise(const Tensor3& x, const Tensor3& y) {
    Tensor3 out(x.rows, y.cols, x.depth);
    for (int t = 0; t < x.depth; ++t)
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < y.cols; ++k) {
                double s = 0.0;
                for (int j = 0; j < x.cols; ++j) s += x(i, j, t) * y(j, k, t);
                out(i, k, t) = s;
            }
    return out;
}

std::vector<CsrMatrix> dense_to_csr_slices(const Tensor3& x) {
    std::vector<CsrMatrix> out;
    out.reserve(x.depth);
    for (int t = 0; t < x.depth; ++t) out.push_back(CsrMatrix::from_dense(x.slice_matrix(t)));
    return out;
}

PropertyResult make_result(std::string suite, std::string name, double tol, double observed,
                           std::string note = {}) {
    PropertyResult r;
    r.suite = std::move(suite);
    r.name = std::move(name);
    r.tolerance = tol;
    r.observed = observed;
    r.pass = observed <= tol;
    r.note = std::move(note);
    return r;
}

double max_abs(const Tensor3& x) {
    double m = 0.0;
    for (double v : x.v) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

std::vector<PropertyResult> verify_algebra(const VerifyOptions& opt) {
    std::vector<PropertyResult> out;
    const int trials = std::max(1, opt.trials);

    {
        Rng rng(opt.seed + 1);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const Tensor3 x = rand_tensor(rng, rng.range(1, 6), rng.range(1, 6), rng.range(1, 5));
            const Tensor3 back = fold(unfold(x), x.rows, x.cols, x.depth);
            worst = std::max(worst, frobenius_diff(back, x));
        }
        out.push_back(make_result("algebra", "fold(unfold(x)) returns x exactly", 0.0, worst));
    }
    {
        Rng rng(opt.seed + 2);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 6);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_tensor(rng, rng.range(1, 6), rng.range(1, 6), t);
            Tensor3 back = m_transform(m_transform(x, m), m, true);
            if (opt.inject_fault) back.v[0] += 1e-3;
            worst = std::max(worst, relative_error(back, x));
        }
        out.push_back(make_result("algebra", "transform round trip", 1e-10, worst,
                                  opt.inject_fault ? "fault injected" : ""));
    }
    {
        Rng rng(opt.seed + 3);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 5), j = rng.range(1, 5);
            const Tensor3 x = rand_tensor(rng, rng.range(1, 5), j, t);
            const Tensor3 y = rand_tensor(rng, j, rng.range(1, 5), t);
            worst = std::max(worst, relative_error(facewise_product(x, y), naive_facewise(x, y)));
        }
        out.push_back(make_result("algebra", "facewise product matches triple-loop reference", 1e-12, worst));
    }
    {
        Rng rng(opt.seed + 4);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 5), j = rng.range(1, 5);
            const MixingMatrix eye = MixingMatrix::identity(t);
            const Tensor3 x = rand_tensor(rng, rng.range(1, 5), j, t);
            const Tensor3 y = rand_tensor(rng, j, rng.range(1, 5), t);
            worst = std::max(worst,
                             relative_error(m_product(x, y, eye), facewise_product(x, y)));
        }
        out.push_back(make_result("algebra", "identity transform reduces product to facewise", 1e-12, worst));
    }
    {
        Rng rng(opt.seed + 5);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 5), n = rng.range(1, 5), j = rng.range(1, 5);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_tensor(rng, n, j, t);
            const Tensor3 left = m_product(identity_tensor(n, t, m), x, m);
            const Tensor3 right = m_product(x, identity_tensor(j, t, m), m);
            worst = std::max({worst, relative_error(left, x), relative_error(right, x)});
        }
        out.push_back(make_result("algebra", "identity tensor is a two-sided identity", 1e-9, worst));
    }
    {
        Rng rng(opt.seed + 6);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 5);
            const int i = rng.range(1, 4), j = rng.range(1, 4), l = rng.range(1, 4), p = rng.range(1, 4);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_tensor(rng, i, j, t);
            const Tensor3 y = rand_tensor(rng, j, l, t);
            const Tensor3 z = rand_tensor(rng, l, p, t);
            const Tensor3 lhs = m_product(m_product(x, y, m), z, m);
            const Tensor3 rhs = m_product(x, m_product(y, z, m), m);
            worst = std::max(worst, relative_error(lhs, rhs));
        }
        out.push_back(make_result("algebra", "product associativity", 1e-9, worst));
    }
    {
        Rng rng(opt.seed + 7);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 6);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 a = rand_tensor(rng, 1, 1, t);
            const Tensor3 b = rand_tensor(rng, 1, 1, t);
            worst = std::max(worst, frobenius_diff(m_product(a, b, m), m_product(b, a, m)));
        }
        out.push_back(make_result("algebra", "tube scalars commute", 1e-12, worst));
    }
    {
        Rng rng(opt.seed + 8);
        double worst_inv = 0.0, worst_rev = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 5), j = rng.range(1, 5);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_tensor(rng, rng.range(1, 5), j, t);
            const Tensor3 y = rand_tensor(rng, j, rng.range(1, 5), t);
            worst_inv = std::max(worst_inv, relative_error(tensor_transpose(tensor_transpose(x, m), m), x));
            const Tensor3 lhs = tensor_transpose(m_product(x, y, m), m);
            const Tensor3 rhs = m_product(tensor_transpose(y, m), tensor_transpose(x, m), m);
            worst_rev = std::max(worst_rev, relative_error(lhs, rhs));
        }
        out.push_back(make_result("algebra", "transpose is an involution", 1e-10, worst_inv));
        out.push_back(make_result("algebra", "transpose reverses products", 1e-9, worst_rev));
    }
    {
        Rng rng(opt.seed + 9);
        double worst_rows = 0.0, worst_eye = 0.0, worst_uniform = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 12);
            const int b = rng.range(1, t + 3);
            const MixingMatrix m = banded_mixing_matrix(t, b);
            for (int r = 0; r < t; ++r) {
                double sum = 0.0;
                for (int c = 0; c < t; ++c) sum += m.m()(r, c);
                worst_rows = std::max(worst_rows, std::abs(sum - 1.0));
            }
            const MixingMatrix one = banded_mixing_matrix(t, 1);
            worst_eye = std::max(worst_eye, max_abs_diff(one.m(), Matrix::identity(t)));
            const MixingMatrix wide = banded_mixing_matrix(t, t + 2);
            for (int c = 0; c < t; ++c)
                worst_uniform = std::max(worst_uniform, std::abs(wide.m()(t - 1, c) - 1.0 / t));
        }
        out.push_back(make_result("algebra", "banded rows sum to one", 1e-15, worst_rows));
        out.push_back(make_result("algebra", "bandwidth one gives the identity", 0.0, worst_eye));
        out.push_back(make_result("algebra", "wide band averages uniformly", 1e-15, worst_uniform));
    }
    {
        // Hand-checked 3 x 3 band and the tube it maps.
        const MixingMatrix m = banded_mixing_matrix(3, 2);
        const double want[3][3] = {{1, 0, 0}, {0.5, 0.5, 0}, {0, 0.5, 0.5}};
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(m.m()(i, j) - want[i][j]));
        Tensor3 tube(1, 1, 3);
        tube(0, 0, 0) = 1;
        tube(0, 0, 1) = 2;
        tube(0, 0, 2) = 3;
        const Tensor3 mapped = m_transform(tube, m);
        const double expect[3] = {1.0, 1.5, 2.5};
        for (int t = 0; t < 3; ++t) worst = std::max(worst, std::abs(mapped(0, 0, t) - expect[t]));
        out.push_back(make_result("algebra", "banded transform hand-checked values", 1e-15, worst));
    }
    {
        Rng rng(opt.seed + 10);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int t = rng.range(1, 6);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_tensor(rng, rng.range(1, 6), rng.range(1, 6), t);
            const double bound = spectral_norm(m.m_inv()) * frobenius_norm(m_transform(x, m));
            const double violation = frobenius_norm(x) - bound;
            worst = std::max(worst, violation / std::max(1.0, bound));
        }
        out.push_back(make_result("algebra", "norm bounded by transformed norm times inverse gain",
                                  1e-12, worst));
    }
    return out;
}

std::vector<PropertyResult> verify_spectral(const VerifyOptions& opt) {
    std::vector<PropertyResult> out;
    const int trials = std::max(1, opt.trials);

    {
        Rng rng(opt.seed + 20);
        double worst_rec = 0.0, worst_orth = 0.0;
        const int cases = std::min(trials, 12);
        for (int k = 0; k < cases; ++k) {
            const int n = k == 0 ? 50 : rng.range(2, 20);
            const int t = k == 0 ? 10 : rng.range(1, 6);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_symmetric_slices(rng, n, t);
            const TensorEig eig = tensor_eig(x, m);
            const Tensor3 rec =
                m_product(eig.q, m_product(eig.d, tensor_transpose(eig.q, m), m), m);
            worst_rec = std::max(worst_rec, frobenius_diff(rec, x) / frobenius_norm(x));
            const Tensor3 eye = identity_tensor(n, t, m);
            const Tensor3 qt = tensor_transpose(eig.q, m);
            worst_orth = std::max(worst_orth,
                                  std::max(max_abs(subtract(m_product(eig.q, qt, m), eye)),
                                           max_abs(subtract(m_product(qt, eig.q, m), eye))));
        }
        out.push_back(make_result("spectral", "eigendecomposition reconstructs the tensor", 1e-7,
                                  worst_rec));
        out.push_back(make_result("spectral", "eigenfactor orthogonality", 1e-8, worst_orth));
    }
    {
        Rng rng(opt.seed + 21);
        double worst = 0.0;
        for (int k = 0; k < trials; ++k) {
            const int n = rng.range(3, 16), t = rng.range(2, 8);
            const AdjacencyTensor a = rand_graph_adjacency(rng, n, t, 0.4);
            const MixingMatrix m = banded_mixing_matrix(t, rng.range(1, t));
            const SpectralBoundReport rep = spectral_bound_check(a, m);
            if (!rep.asserted) continue;
            worst = std::max({worst, -rep.min_eigenvalue, rep.max_eigenvalue - 2.0, 0.0});
        }
        out.push_back(make_result("spectral", "normalized laplacian spectrum stays within [0, 2]",
                                  1e-8, worst));
    }
    {
        // Deterministic output: identical input, identical factors, bit for bit.
        Rng rng_a(opt.seed + 22), rng_b(opt.seed + 22);
        const Tensor3 xa = rand_symmetric_slices(rng_a, 12, 4);
        const Tensor3 xb = rand_symmetric_slices(rng_b, 12, 4);
        const MixingMatrix m = banded_mixing_matrix(4, 2);
        const TensorEig ea = tensor_eig(xa, m);
        const TensorEig eb = tensor_eig(xb, m);
        const double diff = std::max(frobenius_diff(ea.q, eb.q), frobenius_diff(ea.d, eb.d));
        out.push_back(make_result("spectral", "eigendecomposition is deterministic", 0.0, diff));
    }
    {
        Rng rng(opt.seed + 23);
        const int n = 30, t = 4;
        const AdjacencyTensor a = rand_graph_adjacency(rng, n, t, 0.3);
        const MixingMatrix m = banded_mixing_matrix(t, 2);
        const Tensor3 lap = laplacian_tensor(a, m);
        const TensorEig eig = tensor_eig(lap, m);
        const auto exp_filter = [](int, double lam) { return std::exp(-lam); };

        double errs[3];
        const int degrees[3] = {1, 3, 5};
        for (int i = 0; i < 3; ++i) errs[i] = fit_tubal_polynomial(exp_filter, eig, degrees[i], m).error;
        char note[160];
        std::snprintf(note, sizeof(note), "errors K=1:%.3e K=3:%.3e K=5:%.3e", errs[0], errs[1],
                      errs[2]);
        PropertyResult r = make_result(
            "spectral", "polynomial filter fit improves strictly with degree", 0.0, 0.0, note);
        r.pass = errs[0] > errs[1] && errs[1] > errs[2];
        r.observed = std::max(errs[1] - errs[0], errs[2] - errs[1]);
        out.push_back(r);

        // Exactly representable filters are recovered to rounding.
        const auto quad = [](int, double lam) { return 0.75 - 1.25 * lam + 0.5 * lam * lam; };
        const TubalPolyFit qf = fit_tubal_polynomial(quad, eig, 2, m);
        out.push_back(make_result("spectral", "degree-2 filter fit is exact at degree 2", 1e-9,
                                  qf.error));
        const TubalPolyFit lf = fit_tubal_polynomial([](int, double lam) { return lam; }, eig, 1, m);
        double coeff_err = lf.error;
        for (int s = 0; s < t; ++s) {
            coeff_err = std::max(coeff_err, std::abs(lf.poly.coeffs_transformed(0, s)));
            coeff_err = std::max(coeff_err, std::abs(lf.poly.coeffs_transformed(1, s) - 1.0));
        }
        out.push_back(make_result("spectral", "identity filter fit recovers coefficients (0, 1)",
                                  1e-9, coeff_err));

        const Tensor3 x = rand_tensor(rng, n, 2, t);
        const Tensor3 via_eig = spectral_filter(x, eig, quad, m);
        const Tensor3 via_poly = apply_polynomial_filter(x, lap, qf.poly, m);
        out.push_back(make_result("spectral",
                                  "polynomial application matches the eigenspace filter", 1e-8,
                                  relative_error(via_poly, via_eig)));

        const Tensor3 id_filtered = spectral_filter(x, eig, [](int, double) { return 1.0; }, m);
        out.push_back(make_result("spectral", "constant-one filter is the identity", 1e-8,
                                  relative_error(id_filtered, x)));
        const Tensor3 lin_filtered = spectral_filter(x, eig, [](int, double lam) { return lam; }, m);
        out.push_back(make_result("spectral", "linear filter applies the laplacian", 1e-8,
                                  relative_error(lin_filtered, m_product(lap, x, m))));

        // Independent dense reference for the exponential filter, assembled
        // slice by slice in the transformed space.
        const Tensor3 x_hat = m_transform(x, m);
        const Tensor3 lap_hat = m_transform(lap, m);
        Tensor3 ref_hat(n, x.cols, t);
        for (int s = 0; s < t; ++s) {
            const SymmetricEig se = jacobi_eigh(lap_hat.slice_matrix(s));
            Matrix g(n, n);
            for (int i = 0; i < n; ++i) g(i, i) = std::exp(-se.values[i]);
            const Matrix filt = matmul(matmul(se.vectors, g), transpose(se.vectors));
            ref_hat.set_slice(s, matmul(filt, x_hat.slice_matrix(s)));
        }
        const Tensor3 ref = m_transform(ref_hat, m, true);
        const Tensor3 got = spectral_filter(x, eig, exp_filter, m);
        out.push_back(make_result("spectral", "exponential filter matches dense per-slice reference",
                                  1e-8, relative_error(got, ref)));

        // Degree-one collapse: theta0 = -theta1 = theta reduces the two-term
        // polynomial to adjacency * signal * theta.
        const Tensor3 theta = rand_tensor(rng, 1, 1, t);
        const Tensor3 sig = rand_tensor(rng, n, 1, t);
        TubalPolynomial two_term;
        two_term.degree = 1;
        two_term.thetas = {theta, theta};
        for (double& v : two_term.thetas[1].v) v = -v;
        two_term.coeffs_transformed = Matrix(2, t);
        const Tensor3 via_two = apply_polynomial_filter(sig, lap, two_term, m);
        const Tensor3 via_adj = degree_one_filter(a, sig, theta, m);
        out.push_back(make_result("spectral", "degree-one collapse onto the adjacency product",
                                  1e-9, relative_error(via_two, via_adj)));
    }
    {
        Rng rng(opt.seed + 24);
        double worst_rt = 0.0, worst_parseval = 0.0, worst_basis = 0.0, worst_self = 0.0;
        const int cases = std::min(trials, 10);
        for (int k = 0; k < cases; ++k) {
            const int n = rng.range(2, 10), t = rng.range(1, 5);
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 x = rand_symmetric_slices(rng, n, t);
            const TensorEig eig = tensor_eig(x, m);
            const Tensor3 sig = rand_tensor(rng, n, rng.range(1, 3), t);
            const Tensor3 f = graph_fourier(sig, eig, m);
            worst_rt = std::max(worst_rt, relative_error(graph_fourier_inverse(f, eig, m), sig));
            worst_parseval =
                std::max(worst_parseval, std::abs(frobenius_norm(m_transform(f, m)) -
                                                  frobenius_norm(m_transform(sig, m))) /
                                             std::max(1.0, frobenius_norm(m_transform(sig, m))));
            worst_self = std::max(
                worst_self,
                max_abs(subtract(graph_fourier(eig.q, eig, m), identity_tensor(n, t, m))));

            // Expansion in the lateral basis, summed tube by tube.
            Tensor3 v = rand_tensor(rng, n, 1, t);
            const Tensor3 coeff = m_product(tensor_transpose(eig.q, m), v, m);
            Tensor3 rebuilt(n, 1, t);
            for (int c = 0; c < n; ++c) {
                Tensor3 column(n, 1, t), tube(1, 1, t);
                for (int tt = 0; tt < t; ++tt) {
                    tube(0, 0, tt) = coeff(c, 0, tt);
                    for (int i = 0; i < n; ++i) column(i, 0, tt) = eig.q(i, c, tt);
                }
                rebuilt = add(rebuilt, tube_product(column, tube, m));
            }
            worst_basis = std::max(worst_basis, relative_error(rebuilt, v));
        }
        out.push_back(make_result("spectral", "fourier transform round trip", 1e-8, worst_rt));
        out.push_back(make_result("spectral", "fourier preserves the transformed norm", 1e-8,
                                  worst_parseval));
        out.push_back(make_result("spectral", "fourier of the eigenbasis is the identity", 1e-8,
                                  worst_self));
        out.push_back(make_result("spectral", "lateral slices expand random signals", 1e-8,
                                  worst_basis));
    }
    return out;
}

std::vector<PropertyResult> verify_gradients(const VerifyOptions& opt) {
    std::vector<PropertyResult> out;

    struct Instance {
        std::vector<CsrMatrix> a_hat;
        Tensor3 x_hat;
        ModelParams params;
        std::vector<LabeledEdge> edges;
        std::vector<double> alpha;
    };
    auto make_instance = [](Rng& rng, int layer_count, int classes) {
        Instance ins;
        const int n = rng.range(3, 6), t = rng.range(2, 4), f = 2, f_out = 3;
        Tensor3 a = rand_tensor(rng, n, n, t, 0.0, 1.0);
        for (double& v : a.v)
            if (v < 0.5) v = 0.0;  // keep the slices sparse-ish
        ins.a_hat = dense_to_csr_slices(a);
        ins.x_hat = rand_tensor(rng, n, f, t);
        ins.params = init_params(f, f_out, layer_count, classes, rng);
        const int edge_count = rng.range(6, 12);
        for (int e = 0; e < edge_count; ++e)
            ins.edges.push_back({rng.range(0, n - 1), rng.range(0, n - 1), rng.range(0, t - 1),
                                 rng.range(0, classes - 1)});
        double sum = 0.0;
        for (int c = 0; c < classes; ++c) {
            ins.alpha.push_back(0.2 + rng.uniform());
            sum += ins.alpha.back();
        }
        for (double& a0 : ins.alpha) a0 /= sum;
        return ins;
    };

    auto loss_of = [](const Instance& ins, const ModelParams& p, Activation act) {
        const Tensor3 y = forward(ins.a_hat, ins.x_hat, p.layers, act);
        return loss_value(y, p.classifier, ins.edges, ins.alpha);
    };

    // Analytic gradients against central differences over every parameter.
    auto fd_error = [&](const Instance& ins, Activation act) {
        const double h = 1e-6;
        const LossGrad lg =
            loss_and_gradients(ins.a_hat, ins.x_hat, ins.params, act, ins.edges, ins.alpha);
        double denom = 1e-6, worst = 0.0;
        ModelParams p = ins.params;
        auto probe = [&](Matrix& target, const Matrix& analytic) {
            for (std::size_t i = 0; i < target.v.size(); ++i) {
                const double orig = target.v[i];
                target.v[i] = orig + h;
                const double up = loss_of(ins, p, act);
                target.v[i] = orig - h;
                const double down = loss_of(ins, p, act);
                target.v[i] = orig;
                const double fd = (up - down) / (2 * h);
                denom = std::max(denom, std::abs(fd));
                worst = std::max(worst, std::abs(fd - analytic.v[i]));
            }
        };
        for (std::size_t l = 0; l < p.layers.size(); ++l) probe(p.layers[l].w_hat, lg.grad.w[l]);
        probe(p.classifier.u, lg.grad.u);
        return worst / std::max(1.0, denom);
    };

    {
        Rng rng(opt.seed + 40);
        double worst1 = 0.0, worst2 = 0.0;
        for (int s = 0; s < 10; ++s) {
            const int classes = s % 2 == 0 ? 2 : 3;
            worst1 = std::max(worst1, fd_error(make_instance(rng, 1, classes), Activation::relu));
            worst2 = std::max(worst2, fd_error(make_instance(rng, 2, classes), Activation::relu));
        }
        out.push_back(make_result("gradients",
                                  "single-layer gradients match finite differences", 1e-5, worst1));
        out.push_back(make_result("gradients", "two-layer gradients match finite differences", 1e-5,
                                  worst2));
    }
    {
        // Transformed-space layers against the naive product composition.
        Rng rng(opt.seed + 41);
        double worst1 = 0.0, worst2 = 0.0;
        for (int s = 0; s < 8; ++s) {
            const int n = rng.range(3, 6), t = rng.range(2, 5), f = 2, f_out = 3;
            const MixingMatrix m = rand_mixing(rng, t);
            const Tensor3 a = rand_tensor(rng, n, n, t, 0.0, 0.5);
            const Tensor3 x = rand_tensor(rng, n, f, t);
            Rng prng(rng.next_u64());
            const ModelParams params = init_params(f, f_out, 2, 2, prng);

            // Weight tensors whose transformed slices all equal the trained slice.
            auto materialize = [&](const Matrix& w_hat) {
                Tensor3 w_hat_tensor(w_hat.rows, w_hat.cols, t);
                for (int tt = 0; tt < t; ++tt) w_hat_tensor.set_slice(tt, w_hat);
                return m_transform(w_hat_tensor, m, true);
            };
            const Tensor3 w0 = materialize(params.layers[0].w_hat);
            const Tensor3 w1 = materialize(params.layers[1].w_hat);

            const std::vector<CsrMatrix> a_hat = m_transform_sparse(dense_to_csr_slices(a), m);
            const Tensor3 x_hat = m_transform(x, m);

            const Tensor3 one_layer =
                forward(a_hat, x_hat, {params.layers[0]}, Activation::relu);
            const Tensor3 naive1 = m_product(m_product(a, x, m), w0, m);
            worst1 = std::max(worst1, relative_error(m_transform(one_layer, m, true), naive1));

            const Tensor3 two_layer = forward(a_hat, x_hat, params.layers, Activation::relu);
            Tensor3 inner = m_transform(naive1, m);
            for (double& v : inner.v) v = v > 0.0 ? v : 0.0;  // activation in the transformed space
            const Tensor3 naive2 =
                m_product(m_product(a, m_transform(inner, m, true), m), w1, m);
            worst2 = std::max(worst2, relative_error(m_transform(two_layer, m, true), naive2));
        }
        out.push_back(make_result("gradients", "single-layer forward equals the naive product path",
                                  1e-9, worst1));
        out.push_back(make_result("gradients", "two-layer forward equals the naive product path",
                                  1e-9, worst2));
    }
    {
        // Permuting the batch changes nothing; scaling one class weight
        // scales exactly that class's contribution.
        Rng rng(opt.seed + 42);
        const Instance ins = make_instance(rng, 1, 2);
        const LossGrad base =
            loss_and_gradients(ins.a_hat, ins.x_hat, ins.params, Activation::relu, ins.edges, ins.alpha);
        std::vector<LabeledEdge> shuffled = ins.edges;
        std::reverse(shuffled.begin(), shuffled.end());
        std::swap(shuffled[0], shuffled[shuffled.size() / 2]);
        const LossGrad perm =
            loss_and_gradients(ins.a_hat, ins.x_hat, ins.params, Activation::relu, shuffled, ins.alpha);
        double diff = std::abs(base.loss - perm.loss);
        for (std::size_t l = 0; l < base.grad.w.size(); ++l)
            diff = std::max(diff, max_abs_diff(base.grad.w[l], perm.grad.w[l]));
        diff = std::max(diff, max_abs_diff(base.grad.u, perm.grad.u));
        out.push_back(make_result("gradients", "batch order cannot change loss or gradients", 0.0,
                                  diff));

        std::vector<double> doubled = ins.alpha;
        doubled[0] *= 2.0;
        std::vector<LabeledEdge> class0;
        for (const LabeledEdge& e : ins.edges)
            if (e.cls == 0) class0.push_back(e);
        double scale_diff = 0.0;
        if (!class0.empty()) {
            const LossGrad g1 = loss_and_gradients(ins.a_hat, ins.x_hat, ins.params,
                                                   Activation::relu, class0, ins.alpha);
            const LossGrad g2 = loss_and_gradients(ins.a_hat, ins.x_hat, ins.params,
                                                   Activation::relu, class0, doubled);
            for (std::size_t i = 0; i < g1.grad.u.v.size(); ++i)
                scale_diff = std::max(scale_diff,
                                      std::abs(2.0 * g1.grad.u.v[i] - g2.grad.u.v[i]));
            scale_diff = std::max(scale_diff, std::abs(2.0 * g1.loss - g2.loss));
        }
        out.push_back(make_result("gradients", "doubling a class weight doubles its contribution",
                                  0.0, scale_diff));

        // A zero class weight silences its edges completely.
        const std::vector<double> silent{1.0, 0.0};
        std::vector<LabeledEdge> class1;
        for (const LabeledEdge& e : ins.edges)
            if (e.cls == 1) class1.push_back(e);
        double zero_diff = 0.0;
        if (!class1.empty()) {
            const LossGrad g = loss_and_gradients(ins.a_hat, ins.x_hat, ins.params,
                                                  Activation::relu, class1, silent);
            zero_diff = std::abs(g.loss);
            for (const Matrix& w : g.grad.w)
                for (double v : w.v) zero_diff = std::max(zero_diff, std::abs(v));
            for (double v : g.grad.u.v) zero_diff = std::max(zero_diff, std::abs(v));
        }
        out.push_back(make_result("gradients", "zero-weight classes contribute nothing", 0.0,
                                  zero_diff));
    }
    return out;
}

PropertyResult dataset_bound_check(const ExperimentConfig& c, int max_nodes) {
    DynamicGraph g = partition(parse_dataset(c.dataset, c.data_path), c.dataset);
    std::string note;
    if (g.num_nodes > max_nodes) {
        g = induce_subgraph(g, top_degree_nodes(g, max_nodes));
        note = "induced subgraph of the " + std::to_string(max_nodes) +
               " highest-degree nodes (full graph exceeds the dense eigensolve budget); ";
    }
    c.split.validate(g.num_steps);
    const PrepareOptions options{c.edge_life, c.symmetrize, c.log_features};
    AdjacencyTensor a;
    a.slices = window_normalized_slices(g, 0, c.split.s_train, options);
    a.normalized = true;
    a.symmetrized = c.symmetrize;
    const MixingMatrix m = banded_mixing_matrix(c.split.s_train, c.bandwidth);
    const SpectralBoundReport rep = spectral_bound_check(a, m);

    char buf[200];
    std::snprintf(buf, sizeof(buf), "nodes=%d slices=%d min=%.3e max=%.9f solver=%s%s", rep.nodes,
                  rep.depth, rep.min_eigenvalue, rep.max_eigenvalue, rep.solver.c_str(),
                  rep.asserted ? "" : " (asymmetric input: reported, not asserted)");
    PropertyResult r = make_result(
        "spectral", "dataset laplacian spectrum within [0, 2] (" + to_string(c.dataset) + ")", 1e-8,
        std::max({0.0, -rep.min_eigenvalue, rep.max_eigenvalue - 2.0}), note + buf);
    if (!rep.asserted) r.pass = true;  // reported only
    return r;
}

bool all_passed(const std::vector<PropertyResult>& results) {
    for (const PropertyResult& r : results)
        if (!r.pass) return false;
    return true;
}

std::string format_property_table(const std::vector<PropertyResult>& results) {
    std::string out;
    char line[512];
    for (const PropertyResult& r : results) {
        std::snprintf(line, sizeof(line), "[%s] %-9s %-58s tol=%-9.3g observed=%-12.5g %s\n",
                      r.pass ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str(), r.tolerance,
                      r.observed, r.note.c_str());
        out += line;
    }
    return out;
}

std::string property_csv(const std::vector<PropertyResult>& results) {
    std::string out = "suite,property,tolerance,observed,pass,note\n";
    char line[512];
    for (const PropertyResult& r : results) {
        std::string note = r.note;
        for (char& ch : note)
            if (ch == ',') ch = ';';
        std::snprintf(line, sizeof(line), "%s,\"%s\",%.17g,%.17g,%d,\"%s\"\n", r.suite.c_str(),
                      r.name.c_str(), r.tolerance, r.observed, r.pass ? 1 : 0, note.c_str());
        out += line;
    }
    return out;
}

}  // namespace tgcn
