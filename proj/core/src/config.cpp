#include "tgcn/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "tgcn/errors.hpp"

namespace tgcn {

ExperimentConfig ExperimentConfig::defaults(DatasetKind kind) {
    const DatasetInfo& info = dataset_info(kind);
    ExperimentConfig c;
    c.dataset = kind;
    c.split = {info.s_train, info.s_val, info.s_test};
    c.metric = to_string(info.metric);
    if (info.classes == 2) {
        // Minority-class weight grid 0.75, 0.76, ..., 0.95.
        for (int i = 0; i <= 20; ++i) c.alpha0_grid.push_back(0.75 + 0.01 * i);
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (split.s_train <= 0 || split.s_val <= 0 || split.s_test <= 0)
        throw ConfigError("split: every part must be positive");
    if (bandwidth < 1) throw ConfigError("bandwidth must be >= 1");
    if (bandwidth > split.s_train) throw ConfigError("bandwidth must not exceed s_train");
    if (edge_life < 1) throw ConfigError("edge life must be >= 1");
    if (out_features < 1) throw ConfigError("output feature count must be >= 1");
    if (layer_count < 1) throw ConfigError("layer count must be >= 1");
    if (learning_rate < 0.0) throw ConfigError("learning rate must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
    if (iterations < 1) throw ConfigError("iteration count must be >= 1");
    if (eval_interval < 1) throw ConfigError("evaluation interval must be >= 1");
    if (!alpha.empty()) {
        if (static_cast<int>(alpha.size()) != classes())
            throw ConfigError("alpha must have one weight per class (" + std::to_string(classes()) +
                              ")");
        ClassWeights cw{alpha};
        cw.validate();
    }
    for (double a0 : alpha0_grid)
        if (!(a0 > 0.0 && a0 < 1.0)) throw ConfigError("alpha0 grid values must lie in (0, 1)");
    if (!alpha0_grid.empty() && classes() != 2)
        throw ConfigError("alpha0 grid applies to 2-class datasets only; alpha must be length-" +
                          std::to_string(classes()) + " here");
    activation_kind();
    metric_kind();
}

Metric ExperimentConfig::metric_kind() const {
    return metric.empty() ? dataset_info(dataset).metric : metric_from_string(metric);
}

Activation ExperimentConfig::activation_kind() const { return activation_from_string(activation); }

std::vector<double> ExperimentConfig::resolved_alpha() const {
    if (!alpha.empty()) return alpha;
    return std::vector<double>(classes(), 1.0 / classes());
}

std::vector<std::vector<double>> ExperimentConfig::sweep_alphas() const {
    std::vector<std::vector<double>> out;
    if (alpha0_grid.empty()) {
        out.push_back(resolved_alpha());
        return out;
    }
    if (classes() != 2)
        throw ConfigError("alpha0 grid applies to 2-class datasets only");
    for (double a0 : alpha0_grid) out.push_back({a0, 1.0 - a0});
    return out;
}

namespace {

using nlohmann::json;

json to_json_value(const ExperimentConfig& c) {
    json j;
    j["dataset"] = to_string(c.dataset);
    j["data_path"] = c.data_path;
    j["split"] = {{"train", c.split.s_train}, {"val", c.split.s_val}, {"test", c.split.s_test}};
    j["bandwidth"] = c.bandwidth;
    j["edge_life"] = c.edge_life;
    j["out_features"] = c.out_features;
    j["layers"] = c.layer_count;
    j["symmetrize"] = c.symmetrize;
    j["log_features"] = c.log_features;
    j["learning_rate"] = c.learning_rate;
    j["momentum"] = c.momentum;
    j["iterations"] = c.iterations;
    j["eval_interval"] = c.eval_interval;
    j["alpha"] = c.alpha;
    j["alpha0_grid"] = c.alpha0_grid;
    j["normalize_loss"] = c.normalize_loss;
    j["activation"] = c.activation;
    j["metric"] = c.metric.empty() ? to_string(dataset_info(c.dataset).metric) : c.metric;
    j["seed"] = c.seed;
    j["cache_path"] = c.cache_path;
    return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) { return to_json_value(c).dump(1); }

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    try {
        if (!j.contains("dataset")) throw ConfigError("config: missing \"dataset\"");
        ExperimentConfig c = ExperimentConfig::defaults(dataset_from_string(j.at("dataset")));
        if (j.contains("data_path")) c.data_path = j.at("data_path").get<std::string>();
        if (j.contains("split")) {
            const json& s = j.at("split");
            c.split = {s.at("train").get<int>(), s.at("val").get<int>(), s.at("test").get<int>()};
        }
        if (j.contains("bandwidth")) c.bandwidth = j.at("bandwidth").get<int>();
        if (j.contains("edge_life")) c.edge_life = j.at("edge_life").get<int>();
        if (j.contains("out_features")) c.out_features = j.at("out_features").get<int>();
        if (j.contains("layers")) c.layer_count = j.at("layers").get<int>();
        if (j.contains("symmetrize")) c.symmetrize = j.at("symmetrize").get<bool>();
        if (j.contains("log_features")) c.log_features = j.at("log_features").get<bool>();
        if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
        if (j.contains("momentum")) c.momentum = j.at("momentum").get<double>();
        if (j.contains("iterations")) c.iterations = j.at("iterations").get<long>();
        if (j.contains("eval_interval")) c.eval_interval = j.at("eval_interval").get<int>();
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<std::vector<double>>();
        if (j.contains("alpha0_grid")) c.alpha0_grid = j.at("alpha0_grid").get<std::vector<double>>();
        if (j.contains("normalize_loss")) c.normalize_loss = j.at("normalize_loss").get<bool>();
        if (j.contains("activation")) c.activation = j.at("activation").get<std::string>();
        if (j.contains("metric")) c.metric = j.at("metric").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("cache_path")) c.cache_path = j.at("cache_path").get<std::string>();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

void save_config_file(const std::string& path, const ExperimentConfig& c) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << config_to_json(c) << "\n";
}

std::string config_hash(const ExperimentConfig& c) {
    const std::string text = config_to_json(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace tgcn
