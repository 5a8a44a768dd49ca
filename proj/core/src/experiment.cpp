#include "tgcn/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tgcn/errors.hpp"

namespace tgcn {

namespace {

DynamicGraph load_graph(const ExperimentConfig& c) {
    if (!c.cache_path.empty() && std::filesystem::exists(c.cache_path)) {
        DynamicGraph g = load_graph_cache(c.cache_path);
        if (g.kind != c.dataset) throw DataError("graph cache built for a different dataset");
        return g;
    }
    if (c.data_path.empty()) throw ConfigError("no data_path configured");
    DynamicGraph g = partition(parse_dataset(c.dataset, c.data_path), c.dataset);
    if (!c.cache_path.empty()) save_graph_cache(c.cache_path, g);
    return g;
}

}  // namespace

ExperimentData prepare_experiment(const ExperimentConfig& c) {
    c.validate();
    ExperimentData data;
    data.graph = load_graph(c);
    data.stats = ingest_stats(data.graph);
    const MixingMatrix m = banded_mixing_matrix(c.split.s_train, c.bandwidth);
    const PrepareOptions options{c.edge_life, c.symmetrize, c.log_features};
    data.prepared = make_windows(data.graph, c.split, m, options);
    return data;
}

TrainSettings settings_for(const ExperimentConfig& c, const std::vector<double>& alpha) {
    TrainSettings s;
    s.layer_count = c.layer_count;
    s.out_features = c.out_features;
    s.act = c.activation_kind();
    s.learning_rate = c.learning_rate;
    s.momentum = c.momentum;
    s.iterations = c.iterations;
    s.eval_interval = c.eval_interval;
    s.alpha = alpha;
    s.val_metric = c.metric_kind();
    s.seed = c.seed;
    s.normalize_loss = c.normalize_loss;
    return s;
}

double test_metric(const ExperimentConfig& c, const PreparedData& prepared, const ModelParams& params) {
    const Tensor3 y_hat = forward(prepared.test_window.a_hat, prepared.test_window.x_hat,
                                  params.layers, c.activation_kind());
    return evaluate(y_hat, params.classifier, prepared.test_window.edges, c.metric_kind());
}

RunOutput run_single(const ExperimentConfig& c, const PreparedData& prepared,
                     const std::vector<double>& alpha) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    out.selected_result = train(prepared.train_window, prepared.val_window, settings_for(c, alpha));
    out.report.config = c;
    out.report.rows.push_back(
        {alpha, out.selected_result.best_val_metric, out.selected_result.best_iteration});
    out.report.selected = 0;
    out.report.test_metric = test_metric(c, prepared, out.selected_result.best_params);
    out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

RunOutput run_sweep(const ExperimentConfig& c, const PreparedData& prepared) {
    const std::vector<std::vector<double>> grid = c.sweep_alphas();
    if (grid.empty()) throw ConfigError("sweep: empty alpha grid");
    const auto t0 = std::chrono::steady_clock::now();

    RunOutput out;
    out.report.config = c;
    bool have_best = false;
    for (const std::vector<double>& alpha : grid) {
        TrainResult r = train(prepared.train_window, prepared.val_window, settings_for(c, alpha));
        out.report.rows.push_back({alpha, r.best_val_metric, r.best_iteration});
        // Strict improvement only: ties resolve to the earliest grid point.
        if (!have_best || r.best_val_metric > out.report.rows[out.report.selected].best_val_metric) {
            have_best = true;
            out.report.selected = out.report.rows.size() - 1;
            out.selected_result = std::move(r);
        }
    }
    out.report.test_metric = test_metric(c, prepared, out.selected_result.best_params);
    out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string format_report(const RunReport& r) {
    std::string text;
    char buf[256];
    text += "dataset: " + to_string(r.config.dataset) + "\n";
    text += "metric: " + to_string(r.config.metric_kind()) + "\n";
    std::snprintf(buf, sizeof(buf), "sweep points: %zu\n", r.rows.size());
    text += buf;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        std::string alpha_text = "[";
        for (std::size_t k = 0; k < r.rows[i].alpha.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%s%.6g", k > 0 ? ", " : "", r.rows[i].alpha[k]);
            alpha_text += buf;
        }
        alpha_text += "]";
        std::snprintf(buf, sizeof(buf), "  alpha=%-28s best_val=%.6f at iteration %ld%s\n",
                      alpha_text.c_str(), r.rows[i].best_val_metric, r.rows[i].best_iteration,
                      i == r.selected ? "   <- selected" : "");
        text += buf;
    }
    std::snprintf(buf, sizeof(buf), "test metric: %.6f\n", r.test_metric);
    text += buf;
    std::snprintf(buf, sizeof(buf), "wall clock: %.1f s\n", r.wall_seconds);
    text += buf;
    return text;
}

void write_run_artifacts(const std::string& out_dir, const ExperimentConfig& c, const RunOutput& run) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    save_config_file((dir / "config.json").string(), c);
    save_checkpoint((dir / "checkpoint.json").string(),
                    TrainState{run.selected_result.best_params, run.selected_result.final_state.velocity,
                               run.selected_result.best_iteration, c.seed},
                    config_hash(c));
    write_history_csv((dir / "history.csv").string(), run.selected_result.history);

    std::ofstream txt(dir / "report.txt");
    if (!txt) throw DataError("cannot write report.txt under " + out_dir);
    txt << format_report(run.report);

    nlohmann::json j;
    j["config_hash"] = config_hash(c);
    j["test_metric"] = run.report.test_metric;
    j["wall_seconds"] = run.report.wall_seconds;
    j["selected"] = run.report.selected;
    j["rows"] = nlohmann::json::array();
    for (const SweepRow& row : run.report.rows)
        j["rows"].push_back({{"alpha", row.alpha},
                             {"best_val_metric", row.best_val_metric},
                             {"best_iteration", row.best_iteration}});
    std::ofstream js(dir / "report.json");
    js << j.dump(1) << "\n";
}

}  // namespace tgcn
