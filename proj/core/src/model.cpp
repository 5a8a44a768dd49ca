#include "tgcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "tgcn/errors.hpp"
#include "tgcn/tensor_ops.hpp"

namespace tgcn {

namespace {

constexpr double kProbClamp = 1e-12;

double act_fn(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::tanh: return std::tanh(x);
        case Activation::identity: return x;
    }
    return x;
}

// Derivative in terms of the pre-activation; relu uses 0 at the kink.
double act_grad(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: {
            const double th = std::tanh(x);
            return 1.0 - th * th;
        }
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

// out slice t = x slice t * w, for every t.
Tensor3 slicewise_matmul(const Tensor3& x, const Matrix& w) {
    if (x.cols != w.rows) throw ShapeError("slicewise_matmul: inner dimensions differ");
    Tensor3 out(x.rows, w.cols, x.depth);
    for (int t = 0; t < x.depth; ++t) {
        const double* a = x.slice(t);
        double* c = out.slice(t);
        for (int j = 0; j < w.cols; ++j) {
            double* cj = c + static_cast<std::size_t>(j) * x.rows;
            for (int l = 0; l < x.cols; ++l) {
                const double wlj = w(l, j);
                if (wlj == 0.0) continue;
                const double* al = a + static_cast<std::size_t>(l) * x.rows;
                for (int i = 0; i < x.rows; ++i) cj[i] += al[i] * wlj;
            }
        }
    }
    return out;
}

void softmax_stable(const std::vector<double>& logits, std::vector<double>& probs) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    probs.resize(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) {
        probs[c] = std::exp(logits[c] - zmax);
        denom += probs[c];
    }
    for (double& p : probs) p /= denom;
}

std::vector<LabeledEdge> sorted_edges(const std::vector<LabeledEdge>& edges) {
    auto key_less = [](const LabeledEdge& a, const LabeledEdge& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.src != b.src) return a.src < b.src;
        if (a.dst != b.dst) return a.dst < b.dst;
        return a.cls < b.cls;
    };
    if (std::is_sorted(edges.begin(), edges.end(), key_less)) return edges;
    std::vector<LabeledEdge> s = edges;
    std::sort(s.begin(), s.end(), key_less);
    return s;
}

void check_edges(const std::vector<LabeledEdge>& edges, int nodes, int depth, int classes) {
    for (const LabeledEdge& e : edges) {
        if (e.cls < 0 || e.cls >= classes)
            throw DataError("edge label " + std::to_string(e.cls) + " outside [0, " +
                            std::to_string(classes) + ")");
        if (e.src < 0 || e.src >= nodes || e.dst < 0 || e.dst >= nodes || e.t < 0 || e.t >= depth)
            throw ShapeError("edge index out of range");
    }
}

int argmax_lowest_tie(const std::vector<double>& v) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(v.size()); ++c)
        if (v[c] > v[best]) best = c;
    return best;
}

// Shared per-window machinery for the training loop: the layer-0 product
// a_hat * x_hat never changes across iterations, and only rows touched by
// labeled edges matter for the classifier terms, so both are precomputed.
struct WindowRuntime {
    const PreparedWindow* window = nullptr;
    std::vector<LabeledEdge> edges;  // sorted
    Tensor3 z;                       // facewise a_hat * x_hat
    std::vector<CsrMatrix> a_hat_transposed;       // built only when layer_count > 1
    std::vector<std::vector<int>> rows_per_slice;  // unique touched rows, sorted
    std::vector<std::pair<int, int>> edge_slots;   // per edge: positions in rows_per_slice[t]
    std::vector<std::size_t> slice_begin;          // edge range per slice

    WindowRuntime(const PreparedWindow& w, int classes, bool need_transposes)
        : window(&w), edges(sorted_edges(w.edges)) {
        const int depth = w.x_hat.depth;
        check_edges(edges, w.a_hat.empty() ? 0 : w.a_hat[0].rows, depth, classes);
        z = facewise_product(w.a_hat, w.x_hat);
        if (need_transposes) {
            a_hat_transposed.reserve(w.a_hat.size());
            for (const CsrMatrix& s : w.a_hat) a_hat_transposed.push_back(s.transposed());
        }
        rows_per_slice.assign(depth, {});
        slice_begin.assign(depth + 1, edges.size());
        for (const LabeledEdge& e : edges) {
            rows_per_slice[e.t].push_back(e.src);
            rows_per_slice[e.t].push_back(e.dst);
        }
        for (auto& r : rows_per_slice) {
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
        }
        edge_slots.resize(edges.size());
        std::size_t i = 0;
        for (int t = 0; t < depth; ++t) {
            slice_begin[t] = i;
            for (; i < edges.size() && edges[i].t == t; ++i) {
                const auto& r = rows_per_slice[t];
                edge_slots[i] = {
                    static_cast<int>(std::lower_bound(r.begin(), r.end(), edges[i].src) - r.begin()),
                    static_cast<int>(std::lower_bound(r.begin(), r.end(), edges[i].dst) - r.begin())};
            }
        }
        slice_begin[depth] = edges.size();
    }
};

// Classifier-side terms for one edge given phi = [y_src, y_dst]. Returns the
// edge's loss term; accumulates dU += alpha_c (p - onehot) phi^T and
// dphi += U^T (alpha_c (p - onehot)).
double edge_terms(const Matrix& u, const std::vector<double>& alpha, int cls,
                  const std::vector<double>& phi, Matrix* du, std::vector<double>* dphi) {
    const int classes = u.rows;
    static thread_local std::vector<double> logits, probs;
    logits.assign(classes, 0.0);
    for (int c = 0; c < classes; ++c) {
        double s = 0.0;
        for (int j = 0; j < u.cols; ++j) s += u(c, j) * phi[j];
        logits[c] = s;
    }
    softmax_stable(logits, probs);
    const double loss = alpha[cls] * -std::log(std::max(probs[cls], kProbClamp));
    if (du != nullptr) {
        for (int c = 0; c < classes; ++c) {
            const double dz = alpha[cls] * (probs[c] - (c == cls ? 1.0 : 0.0));
            if (dz == 0.0) continue;
            for (int j = 0; j < u.cols; ++j) {
                (*du)(c, j) += dz * phi[j];
                (*dphi)[j] += u(c, j) * dz;
            }
        }
    }
    return loss;
}

Gradients zero_gradients(const ModelParams& p) {
    Gradients g;
    g.w.reserve(p.layers.size());
    for (const LayerWeights& l : p.layers) g.w.emplace_back(l.w_hat.rows, l.w_hat.cols);
    g.u = Matrix(p.classifier.u.rows, p.classifier.u.cols);
    return g;
}

// Single-layer route: embeddings and gradients only materialize at touched rows.
LossGrad loss_grad_single_layer(const WindowRuntime& rt, const ModelParams& params,
                                const std::vector<double>& alpha) {
    const Matrix& w = params.layers[0].w_hat;
    const Matrix& u = params.classifier.u;
    const int f_in = w.rows, f_out = w.cols;
    const int n = rt.z.rows;

    LossGrad out;
    out.grad = zero_gradients(params);
    std::vector<double> y_rows, dy_rows, phi(2 * f_out), dphi(2 * f_out);

    for (int t = 0; t < rt.z.depth; ++t) {
        const auto& rows = rt.rows_per_slice[t];
        if (rows.empty()) continue;
        const double* zt = rt.z.slice(t);
        y_rows.assign(rows.size() * f_out, 0.0);
        dy_rows.assign(rows.size() * f_out, 0.0);
        for (std::size_t s = 0; s < rows.size(); ++s) {
            const int r = rows[s];
            for (int jo = 0; jo < f_out; ++jo) {
                double acc = 0.0;
                for (int ji = 0; ji < f_in; ++ji)
                    acc += zt[static_cast<std::size_t>(ji) * n + r] * w(ji, jo);
                y_rows[s * f_out + jo] = acc;
            }
        }
        for (std::size_t e = rt.slice_begin[t]; e < rt.slice_begin[t + 1]; ++e) {
            const auto [slot_src, slot_dst] = rt.edge_slots[e];
            for (int j = 0; j < f_out; ++j) {
                phi[j] = y_rows[static_cast<std::size_t>(slot_src) * f_out + j];
                phi[f_out + j] = y_rows[static_cast<std::size_t>(slot_dst) * f_out + j];
            }
            std::fill(dphi.begin(), dphi.end(), 0.0);
            out.loss += edge_terms(u, alpha, rt.edges[e].cls, phi, &out.grad.u, &dphi);
            for (int j = 0; j < f_out; ++j) {
                dy_rows[static_cast<std::size_t>(slot_src) * f_out + j] += dphi[j];
                dy_rows[static_cast<std::size_t>(slot_dst) * f_out + j] += dphi[f_out + j];
            }
        }
        Matrix& dw = out.grad.w[0];
        for (std::size_t s = 0; s < rows.size(); ++s) {
            const int r = rows[s];
            for (int ji = 0; ji < f_in; ++ji) {
                const double zv = zt[static_cast<std::size_t>(ji) * n + r];
                if (zv == 0.0) continue;
                for (int jo = 0; jo < f_out; ++jo) dw(ji, jo) += zv * dy_rows[s * f_out + jo];
            }
        }
    }
    return out;
}

// General route: full forward with cached intermediates, dense backward.
LossGrad loss_grad_general(const WindowRuntime& rt, const ModelParams& params, Activation act,
                           const std::vector<double>& alpha) {
    const PreparedWindow& w = *rt.window;
    const int layer_count = static_cast<int>(params.layers.size());
    const int depth = w.x_hat.depth;

    std::vector<Tensor3> ax(layer_count);   // a_hat * (layer input)
    std::vector<Tensor3> pre(layer_count);  // pre-activations
    ax[0] = rt.z;
    pre[0] = slicewise_matmul(ax[0], params.layers[0].w_hat);
    for (int l = 1; l < layer_count; ++l) {
        Tensor3 h = pre[l - 1];
        for (double& v : h.v) v = act_fn(act, v);
        ax[l] = facewise_product(w.a_hat, h);
        pre[l] = slicewise_matmul(ax[l], params.layers[l].w_hat);
    }
    const Tensor3& y_hat = pre[layer_count - 1];
    const int f_out = y_hat.cols;

    LossGrad out;
    out.grad = zero_gradients(params);
    Tensor3 dy(y_hat.rows, f_out, depth);
    std::vector<double> phi(2 * f_out), dphi(2 * f_out);
    for (const LabeledEdge& edge : rt.edges) {
        for (int j = 0; j < f_out; ++j) {
            phi[j] = y_hat(edge.src, j, edge.t);
            phi[f_out + j] = y_hat(edge.dst, j, edge.t);
        }
        std::fill(dphi.begin(), dphi.end(), 0.0);
        out.loss += edge_terms(params.classifier.u, alpha, edge.cls, phi, &out.grad.u, &dphi);
        for (int j = 0; j < f_out; ++j) {
            dy(edge.src, j, edge.t) += dphi[j];
            dy(edge.dst, j, edge.t) += dphi[f_out + j];
        }
    }

    Tensor3 dpre = std::move(dy);
    for (int l = layer_count - 1; l >= 0; --l) {
        Matrix& dw = out.grad.w[l];
        for (int t = 0; t < depth; ++t) {
            const double* a = ax[l].slice(t);
            const double* d = dpre.slice(t);
            const int n = ax[l].rows;
            for (int ji = 0; ji < ax[l].cols; ++ji)
                for (int jo = 0; jo < dpre.cols; ++jo) {
                    double s = 0.0;
                    const double* ac = a + static_cast<std::size_t>(ji) * n;
                    const double* dc = d + static_cast<std::size_t>(jo) * n;
                    for (int i = 0; i < n; ++i) s += ac[i] * dc[i];
                    dw(ji, jo) += s;
                }
        }
        if (l > 0) {
            const Tensor3 dax = slicewise_matmul(dpre, transpose(params.layers[l].w_hat));
            Tensor3 dh = facewise_product(rt.a_hat_transposed, dax);
            for (std::size_t i = 0; i < dh.v.size(); ++i) dh.v[i] *= act_grad(act, pre[l - 1].v[i]);
            dpre = std::move(dh);
        }
    }
    return out;
}

double eval_with_runtime(const WindowRuntime& rt, const ModelParams& params, Activation act,
                         Metric metric) {
    if (rt.edges.empty()) throw DataError("evaluate: empty edge set, metric undefined");
    const int classes = params.classifier.u.rows;
    const int f_out = params.layers.back().w_hat.cols;
    long tp = 0, fp = 0, fn = 0, correct = 0;

    const bool single = params.layers.size() == 1;
    Tensor3 y_full;
    if (!single) y_full = forward(rt.window->a_hat, rt.window->x_hat, params.layers, act);

    std::vector<double> phi(2 * f_out), y_rows, logits(classes);
    const Matrix& w0 = params.layers[0].w_hat;
    const Matrix& u = params.classifier.u;
    for (int t = 0; t < rt.z.depth; ++t) {
        const auto& rows = rt.rows_per_slice[t];
        if (rows.empty()) continue;
        if (single) {
            const double* zt = rt.z.slice(t);
            y_rows.assign(rows.size() * f_out, 0.0);
            for (std::size_t s = 0; s < rows.size(); ++s)
                for (int jo = 0; jo < f_out; ++jo) {
                    double acc = 0.0;
                    for (int ji = 0; ji < w0.rows; ++ji)
                        acc += zt[static_cast<std::size_t>(ji) * rt.z.rows + rows[s]] * w0(ji, jo);
                    y_rows[s * f_out + jo] = acc;
                }
        }
        for (std::size_t e = rt.slice_begin[t]; e < rt.slice_begin[t + 1]; ++e) {
            const LabeledEdge& edge = rt.edges[e];
            if (single) {
                const auto [ss, sd] = rt.edge_slots[e];
                for (int j = 0; j < f_out; ++j) {
                    phi[j] = y_rows[static_cast<std::size_t>(ss) * f_out + j];
                    phi[f_out + j] = y_rows[static_cast<std::size_t>(sd) * f_out + j];
                }
            } else {
                for (int j = 0; j < f_out; ++j) {
                    phi[j] = y_full(edge.src, j, edge.t);
                    phi[f_out + j] = y_full(edge.dst, j, edge.t);
                }
            }
            for (int c = 0; c < classes; ++c) {
                double s = 0.0;
                for (int j = 0; j < u.cols; ++j) s += u(c, j) * phi[j];
                logits[c] = s;
            }
            const int pred = argmax_lowest_tie(logits);
            if (pred == edge.cls) ++correct;
            if (pred == 0 && edge.cls == 0) ++tp;
            if (pred == 0 && edge.cls != 0) ++fp;
            if (pred != 0 && edge.cls == 0) ++fn;
        }
    }
    if (metric == Metric::accuracy) return static_cast<double>(correct) / rt.edges.size();
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "identity") return Activation::identity;
    throw ConfigError("unknown activation: " + s);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    return "relu";
}

Metric metric_from_string(const std::string& s) {
    if (s == "f1_negative") return Metric::f1_negative;
    if (s == "accuracy") return Metric::accuracy;
    throw ConfigError("unknown metric: " + s);
}

std::string to_string(Metric m) { return m == Metric::f1_negative ? "f1_negative" : "accuracy"; }

void ClassWeights::validate() const {
    if (alpha.size() < 2) throw ConfigError("class weights need at least two classes");
    double sum = 0.0;
    for (double a : alpha) {
        if (a < 0.0) throw ConfigError("class weights must be nonnegative");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("class weights must sum to 1");
}

ModelParams init_params(int in_features, int out_features, int layer_count, int classes, Rng& rng) {
    if (layer_count < 1) throw ConfigError("layer count must be >= 1");
    if (classes < 2) throw ConfigError("class count must be >= 2");
    ModelParams p;
    auto glorot = [&rng](Matrix& m, int fan_in, int fan_out) {
        const double s = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : m.v) v = rng.uniform(-s, s);
    };
    for (int l = 0; l < layer_count; ++l) {
        const int fin = l == 0 ? in_features : out_features;
        LayerWeights lw{Matrix(fin, out_features)};
        glorot(lw.w_hat, fin, out_features);
        p.layers.push_back(std::move(lw));
    }
    p.classifier.u = Matrix(classes, 2 * out_features);
    glorot(p.classifier.u, 2 * out_features, classes);
    return p;
}

Tensor3 forward(const std::vector<CsrMatrix>& a_hat, const Tensor3& x_hat,
                const std::vector<LayerWeights>& layers, Activation act) {
    if (layers.empty()) throw ConfigError("forward: at least one layer required");
    Tensor3 h = slicewise_matmul(facewise_product(a_hat, x_hat), layers[0].w_hat);
    for (std::size_t l = 1; l < layers.size(); ++l) {
        for (double& v : h.v) v = act_fn(act, v);
        h = slicewise_matmul(facewise_product(a_hat, h), layers[l].w_hat);
    }
    h.ensure_finite("forward");
    return h;
}

std::vector<double> predict_edge(const Tensor3& y_hat, const ClassifierWeights& u, int src, int dst,
                                 int t) {
    if (src < 0 || src >= y_hat.rows || dst < 0 || dst >= y_hat.rows || t < 0 || t >= y_hat.depth)
        throw ShapeError("predict_edge: index out of range");
    const int f_out = y_hat.cols;
    if (u.u.cols != 2 * f_out) throw ShapeError("predict_edge: classifier width mismatch");
    std::vector<double> phi(2 * f_out);
    for (int j = 0; j < f_out; ++j) {
        phi[j] = y_hat(src, j, t);
        phi[f_out + j] = y_hat(dst, j, t);
    }
    std::vector<double> logits(u.u.rows), probs;
    for (int c = 0; c < u.u.rows; ++c) {
        double s = 0.0;
        for (int j = 0; j < u.u.cols; ++j) s += u.u(c, j) * phi[j];
        logits[c] = s;
    }
    softmax_stable(logits, probs);
    return probs;
}

double loss_value(const Tensor3& y_hat, const ClassifierWeights& u, const std::vector<LabeledEdge>& edges,
                  const std::vector<double>& alpha) {
    const std::vector<LabeledEdge> es = sorted_edges(edges);
    check_edges(es, y_hat.rows, y_hat.depth, static_cast<int>(alpha.size()));
    double loss = 0.0;
    for (const LabeledEdge& e : es) {
        const std::vector<double> p = predict_edge(y_hat, u, e.src, e.dst, e.t);
        loss += alpha[e.cls] * -std::log(std::max(p[e.cls], kProbClamp));
    }
    return loss;
}

LossGrad loss_and_gradients(const std::vector<CsrMatrix>& a_hat, const Tensor3& x_hat,
                            const ModelParams& params, Activation act,
                            const std::vector<LabeledEdge>& edges, const std::vector<double>& alpha) {
    if (static_cast<int>(alpha.size()) != params.classifier.u.rows)
        throw ConfigError("alpha length differs from class count");
    PreparedWindow w{a_hat, x_hat, edges};
    const bool single = params.layers.size() == 1;
    WindowRuntime rt(w, static_cast<int>(alpha.size()), !single);
    return single ? loss_grad_single_layer(rt, params, alpha) : loss_grad_general(rt, params, act, alpha);
}

double evaluate(const Tensor3& y_hat, const ClassifierWeights& u, const std::vector<LabeledEdge>& edges,
                Metric metric) {
    if (edges.empty()) throw DataError("evaluate: empty edge set, metric undefined");
    const std::vector<LabeledEdge> es = sorted_edges(edges);
    check_edges(es, y_hat.rows, y_hat.depth, u.u.rows);
    long tp = 0, fp = 0, fn = 0, correct = 0;
    for (const LabeledEdge& e : es) {
        const std::vector<double> p = predict_edge(y_hat, u, e.src, e.dst, e.t);
        const int pred = argmax_lowest_tie(p);
        if (pred == e.cls) ++correct;
        if (pred == 0 && e.cls == 0) ++tp;
        if (pred == 0 && e.cls != 0) ++fp;
        if (pred != 0 && e.cls == 0) ++fn;
    }
    if (metric == Metric::accuracy) return static_cast<double>(correct) / es.size();
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

TrainResult train(const PreparedWindow& train_window, const PreparedWindow& val_window,
                  const TrainSettings& settings) {
    ClassWeights cw{settings.alpha};
    cw.validate();
    const int classes = static_cast<int>(settings.alpha.size());
    const int in_features = train_window.x_hat.cols;
    const bool single = settings.layer_count == 1;

    Rng rng(settings.seed);
    TrainState state;
    state.seed = settings.seed;
    state.params = init_params(in_features, settings.out_features, settings.layer_count, classes, rng);
    state.velocity = zero_gradients(state.params);

    WindowRuntime train_rt(train_window, classes, !single);
    WindowRuntime val_rt(val_window, classes, false);
    if (train_rt.edges.empty()) throw DataError("train: no labeled edges in the training window");

    const double batch_scale =
        settings.normalize_loss ? 1.0 / static_cast<double>(train_rt.edges.size()) : 1.0;

    TrainResult result;
    bool have_best = false;
    for (long it = 1; it <= settings.iterations; ++it) {
        const LossGrad lg = single
                                ? loss_grad_single_layer(train_rt, state.params, settings.alpha)
                                : loss_grad_general(train_rt, state.params, settings.act, settings.alpha);
        const double loss = lg.loss * batch_scale;
        if (!std::isfinite(loss))
            throw NumericError("train: loss diverged at iteration " + std::to_string(it));

        for (std::size_t l = 0; l < state.params.layers.size(); ++l) {
            Matrix& v = state.velocity.w[l];
            Matrix& p = state.params.layers[l].w_hat;
            const Matrix& g = lg.grad.w[l];
            for (std::size_t i = 0; i < v.v.size(); ++i) {
                v.v[i] = settings.momentum * v.v[i] - settings.learning_rate * batch_scale * g.v[i];
                p.v[i] += v.v[i];
            }
        }
        for (std::size_t i = 0; i < state.velocity.u.v.size(); ++i) {
            state.velocity.u.v[i] = settings.momentum * state.velocity.u.v[i] -
                                    settings.learning_rate * batch_scale * lg.grad.u.v[i];
            state.params.classifier.u.v[i] += state.velocity.u.v[i];
        }
        state.iteration = it;

        if (settings.eval_interval > 0 && it % settings.eval_interval == 0) {
            const double val = eval_with_runtime(val_rt, state.params, settings.act, settings.val_metric);
            result.history.push_back({it, loss, val});
            if (!have_best || val > result.best_val_metric) {
                have_best = true;
                result.best_val_metric = val;
                result.best_iteration = it;
                result.best_params = state.params;
            }
        }
    }
    if (!have_best) {  // no evaluation point recorded; fall back to the final parameters
        result.best_params = state.params;
        result.best_iteration = state.iteration;
        result.best_val_metric =
            val_rt.edges.empty() ? 0.0
                                 : eval_with_runtime(val_rt, state.params, settings.act,
                                                     settings.val_metric);
    }
    result.final_state = std::move(state);
    return result;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    return nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"values", m.v}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != m.v.size()) throw DataError("checkpoint: matrix value count mismatch");
    m.v = vals;
    return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainState& state, const std::string& config_hash) {
    nlohmann::json j;
    j["format"] = "tgcn-checkpoint";
    j["version"] = 1;
    j["config_hash"] = config_hash;
    j["iteration"] = state.iteration;
    j["seed"] = state.seed;
    j["layers"] = nlohmann::json::array();
    j["velocity_layers"] = nlohmann::json::array();
    for (const LayerWeights& l : state.params.layers) j["layers"].push_back(matrix_to_json(l.w_hat));
    for (const Matrix& v : state.velocity.w) j["velocity_layers"].push_back(matrix_to_json(v));
    j["u"] = matrix_to_json(state.params.classifier.u);
    j["velocity_u"] = matrix_to_json(state.velocity.u);
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << j.dump(1) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(std::string("checkpoint parse failure: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "tgcn-checkpoint")
            throw DataError("not a checkpoint file");
        if (j.at("version").get<int>() != 1) throw DataError("unsupported checkpoint version");
        Checkpoint ck;
        ck.config_hash = j.at("config_hash").get<std::string>();
        ck.state.iteration = j.at("iteration").get<long>();
        ck.state.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& lj : j.at("layers")) ck.state.params.layers.push_back({matrix_from_json(lj)});
        for (const auto& vj : j.at("velocity_layers"))
            ck.state.velocity.w.push_back(matrix_from_json(vj));
        ck.state.params.classifier.u = matrix_from_json(j.at("u"));
        ck.state.velocity.u = matrix_from_json(j.at("velocity_u"));
        if (ck.state.params.layers.empty() ||
            ck.state.velocity.w.size() != ck.state.params.layers.size())
            throw DataError("checkpoint: layer/velocity count mismatch");
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint field error: ") + e.what());
    }
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write history csv: " + path);
    out << "iteration,train_loss,val_metric\n";
    char line[96];
    for (const HistoryRow& r : history) {
        std::snprintf(line, sizeof(line), "%ld,%.17g,%.17g\n", r.iteration, r.train_loss,
                      r.val_metric);
        out << line;
    }
}

}  // namespace tgcn
