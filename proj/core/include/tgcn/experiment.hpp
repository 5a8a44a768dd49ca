#pragma once

#include <string>
#include <vector>

#include "tgcn/config.hpp"
#include "tgcn/data.hpp"
#include "tgcn/model.hpp"

namespace tgcn {

struct ExperimentData {
    DynamicGraph graph;
    IngestStats stats;
    PreparedData prepared;
};

// parse (or load from cache) -> partition -> windows, per the config.
ExperimentData prepare_experiment(const ExperimentConfig& c);

struct SweepRow {
    std::vector<double> alpha;
    double best_val_metric = 0.0;
    long best_iteration = 0;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<SweepRow> rows;
    std::size_t selected = 0;  // row with the best validation metric (ties: first)
    double test_metric = 0.0;
    double wall_seconds = 0.0;
};

TrainSettings settings_for(const ExperimentConfig& c, const std::vector<double>& alpha);

// Test-set metric of the given parameters on the prepared test window.
double test_metric(const ExperimentConfig& c, const PreparedData& prepared, const ModelParams& params);

struct RunOutput {
    RunReport report;
    TrainResult selected_result;  // training result of the selected sweep row
};

// Train once with a single alpha vector.
RunOutput run_single(const ExperimentConfig& c, const PreparedData& prepared,
                     const std::vector<double>& alpha);

// Train once per sweep point, pick the best validation metric across all
// points and iterations, evaluate that model once on the test window.
RunOutput run_sweep(const ExperimentConfig& c, const PreparedData& prepared);

std::string format_report(const RunReport& r);

// Output directory layout: config.json, checkpoint.json, history.csv,
// report.txt (plus report.json with full-precision values).
void write_run_artifacts(const std::string& out_dir, const ExperimentConfig& c, const RunOutput& run);

}  // namespace tgcn
