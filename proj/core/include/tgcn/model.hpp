#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgcn/matrix.hpp"
#include "tgcn/rng.hpp"
#include "tgcn/sparse.hpp"
#include "tgcn/tensor3.hpp"

namespace tgcn {

enum class Activation { relu, tanh, identity };
Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

enum class Metric { f1_negative, accuracy };
Metric metric_from_string(const std::string& s);
std::string to_string(Metric m);

// One graph-convolution layer: the single trained slice of the weight tensor
// in the transformed space (every transformed slice of the weight tensor is
// this same matrix).
struct LayerWeights {
    Matrix w_hat;  // in_features x out_features
};

struct ClassifierWeights {
    Matrix u;  // classes x 2*out_features
};

// Per-class loss weights, summing to 1.
struct ClassWeights {
    std::vector<double> alpha;
    void validate() const;  // nonnegative, sums to 1 within 1e-12
};

struct LabeledEdge {
    int src = 0;
    int dst = 0;
    int t = 0;  // window-local slice index
    int cls = 0;
};

struct ModelParams {
    std::vector<LayerWeights> layers;
    ClassifierWeights classifier;
};

struct Gradients {
    std::vector<Matrix> w;  // one per layer
    Matrix u;
};

// Everything the model consumes for one sliding window: transformed
// adjacency slices, transformed features, and the window's labeled edges.
struct PreparedWindow {
    std::vector<CsrMatrix> a_hat;
    Tensor3 x_hat;                  // nodes x features x depth
    std::vector<LabeledEdge> edges;
};

// Symmetric Glorot-style init: every weight uniform in (-s, s) with
// s = sqrt(6 / (fan_in + fan_out)), drawn in a fixed order from the seed.
ModelParams init_params(int in_features, int out_features, int layer_count, int classes, Rng& rng);

// Embedding in the transformed space. Per slice t:
//   h = x_hat slice; repeat per layer: h = a_hat[t] * h * w_hat,
// with the activation applied elementwise between layers (not after the
// last). Output slice t is the transformed embedding of time t.
Tensor3 forward(const std::vector<CsrMatrix>& a_hat, const Tensor3& x_hat,
                const std::vector<LayerWeights>& layers, Activation act);

// softmax(u * [y_hat row src, y_hat row dst]^T); rows taken from slice t.
std::vector<double> predict_edge(const Tensor3& y_hat, const ClassifierWeights& u, int src, int dst,
                                 int t);

// Weighted cross entropy summed over the batch:
//   sum_e alpha[cls_e] * (-log max(p_e[cls_e], 1e-12)).
// Accumulation follows the sorted edge order (t, src, dst), so permuting the
// batch cannot change the value.
double loss_value(const Tensor3& y_hat, const ClassifierWeights& u, const std::vector<LabeledEdge>& edges,
                  const std::vector<double>& alpha);

struct LossGrad {
    double loss = 0.0;
    Gradients grad;
};

// Full-batch loss and analytic gradients for all parameters. The clamp in
// loss_value is ignored by the gradient (it only guards the reported value).
LossGrad loss_and_gradients(const std::vector<CsrMatrix>& a_hat, const Tensor3& x_hat,
                            const ModelParams& params, Activation act,
                            const std::vector<LabeledEdge>& edges, const std::vector<double>& alpha);

// Argmax prediction quality over a labeled edge set; ties go to the lower
// class index. f1_negative scores class 0 as the detection target.
double evaluate(const Tensor3& y_hat, const ClassifierWeights& u, const std::vector<LabeledEdge>& edges,
                Metric metric);

struct TrainSettings {
    int layer_count = 1;
    int out_features = 6;
    Activation act = Activation::relu;
    double learning_rate = 0.01;
    double momentum = 0.9;
    long iterations = 10000;
    int eval_interval = 100;
    std::vector<double> alpha;
    Metric val_metric = Metric::f1_negative;
    std::uint64_t seed = 1;
    bool normalize_loss = false;  // divide loss and gradients by batch size
};

struct HistoryRow {
    long iteration = 0;
    double train_loss = 0.0;
    double val_metric = 0.0;
};

struct TrainState {
    ModelParams params;
    Gradients velocity;  // momentum buffers, same shapes as params
    long iteration = 0;
    std::uint64_t seed = 0;
};

struct TrainResult {
    ModelParams best_params;
    long best_iteration = 0;
    double best_val_metric = 0.0;
    std::vector<HistoryRow> history;
    TrainState final_state;
};

// Full-batch gradient descent with classical momentum
// (v <- mu v - lr g; p <- p + v). Every eval_interval iterations the
// validation metric is computed and recorded together with the loss whose
// gradient produced that iteration's update; the parameters with the best
// recorded validation metric are returned (ties: earliest iteration).
// Throws NumericError if the loss stops being finite.
TrainResult train(const PreparedWindow& train_window, const PreparedWindow& val_window,
                  const TrainSettings& settings);

// Versioned JSON checkpoint: parameters, momentum buffers, iteration, seed,
// and the hash of the config that produced them.
void save_checkpoint(const std::string& path, const TrainState& state, const std::string& config_hash);

struct Checkpoint {
    TrainState state;
    std::string config_hash;
};
Checkpoint load_checkpoint(const std::string& path);

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);

}  // namespace tgcn
