#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgcn/data.hpp"
#include "tgcn/model.hpp"

namespace tgcn {

// Everything one experiment needs, serializable to a JSON config file.
// Defaults (bandwidth 20, edge life 10, 6 output features, 1 layer,
// lr 0.01, momentum 0.9, 10000 iterations, evaluation every 100) follow the
// experimental protocol; the split and metric default per dataset.
struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::bitcoin_otc;
    std::string data_path;
    SplitSpec split;
    int bandwidth = 20;
    int edge_life = 10;
    int out_features = 6;
    int layer_count = 1;
    bool symmetrize = false;
    bool log_features = false;
    double learning_rate = 0.01;
    double momentum = 0.9;
    long iterations = 10000;
    int eval_interval = 100;
    std::vector<double> alpha;        // empty: uniform 1/C
    std::vector<double> alpha0_grid;  // minority-class weight grid (2-class datasets)
    bool normalize_loss = false;
    std::string activation = "relu";
    std::string metric;  // empty: dataset default
    std::uint64_t seed = 1;
    std::string cache_path;

    static ExperimentConfig defaults(DatasetKind kind);

    void validate() const;  // throws ConfigError

    int classes() const { return dataset_info(dataset).classes; }
    Metric metric_kind() const;
    Activation activation_kind() const;
    std::vector<double> resolved_alpha() const;
    // One alpha vector per sweep point: the alpha0 grid expanded for 2-class
    // datasets, or the single resolved alpha when the grid is empty.
    std::vector<std::vector<double>> sweep_alphas() const;

    bool operator==(const ExperimentConfig&) const = default;
};

std::string config_to_json(const ExperimentConfig& c);
// Missing fields fall back to the dataset's defaults; "dataset" is required.
ExperimentConfig config_from_json(const std::string& text);

ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const std::string& path, const ExperimentConfig& c);

// FNV-1a hash of the canonical JSON form, as a hex string. Checkpoints store
// it so evaluation can warn when run under a different config.
std::string config_hash(const ExperimentConfig& c);

}  // namespace tgcn
