// Command-line surface: verification suites, training runs, alpha sweeps,
// and checkpoint evaluation. Exit codes: 0 success, 1 property failure,
// 2 configuration error, 3 data error, 4 numeric error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tgcn/config.hpp"
#include "tgcn/errors.hpp"
#include "tgcn/experiment.hpp"
#include "tgcn/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct ConfigCli {
    std::string config_file;
    std::string dataset;
    std::string data_path;
    std::string cache_path;
    std::string out_dir = "tgcn-out";
    std::string metric;
    std::string activation;
    std::vector<double> alpha;
    double alpha0 = -1.0;
    std::int64_t seed = -1;
    long iterations = -1;
    int bandwidth = -1;
    int edge_life = -1;
    int layers = -1;
    int out_features = -1;
    int eval_interval = -1;
    int s_train = -1, s_val = -1, s_test = -1;
    double learning_rate = -1.0;
    double momentum = -1.0;
    int symmetrize = -1;
    int log_features = -1;
    int normalize_loss = -1;
};

void add_config_options(CLI::App* cmd, ConfigCli& c) {
    cmd->add_option("--config", c.config_file, "JSON config file (flags override its fields)");
    cmd->add_option("--dataset", c.dataset, "bitcoin_otc | bitcoin_alpha | reddit | chess");
    cmd->add_option("--data", c.data_path, "dataset file path (relative to $TGCN_DATA_ROOT if set)");
    cmd->add_option("--cache", c.cache_path, "binary graph cache path");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--seed", c.seed, "rng seed");
    cmd->add_option("--iterations", c.iterations, "gradient descent iterations");
    cmd->add_option("--bandwidth", c.bandwidth, "mixing matrix bandwidth");
    cmd->add_option("--edge-life", c.edge_life, "slices an observed edge stays in the adjacency");
    cmd->add_option("--layers", c.layers, "layer count");
    cmd->add_option("--out-features", c.out_features, "embedding width");
    cmd->add_option("--eval-interval", c.eval_interval, "iterations between validation evaluations");
    cmd->add_option("--s-train", c.s_train, "training slices");
    cmd->add_option("--s-val", c.s_val, "validation slices");
    cmd->add_option("--s-test", c.s_test, "test slices");
    cmd->add_option("--lr", c.learning_rate, "learning rate");
    cmd->add_option("--momentum", c.momentum, "momentum coefficient");
    cmd->add_option("--alpha0", c.alpha0, "minority-class weight (2-class datasets)");
    cmd->add_option("--alpha", c.alpha, "full class-weight vector")->delimiter(',');
    cmd->add_option("--metric", c.metric, "f1_negative | accuracy");
    cmd->add_option("--activation", c.activation, "relu | tanh | identity");
    cmd->add_option("--symmetrize", c.symmetrize, "symmetrize adjacency (0/1)");
    cmd->add_option("--log-features", c.log_features, "log(1+x) feature scaling (0/1)");
    cmd->add_option("--normalize-loss", c.normalize_loss, "divide loss by batch size (0/1)");
}

std::string resolve_data_path(const std::string& path) {
    if (path.empty()) return path;
    const char* root = std::getenv("TGCN_DATA_ROOT");
    if (root != nullptr && *root != '\0' && std::filesystem::path(path).is_relative())
        return (std::filesystem::path(root) / path).string();
    return path;
}

tgcn::ExperimentConfig build_config(const ConfigCli& c) {
    tgcn::ExperimentConfig cfg;
    if (!c.config_file.empty()) {
        cfg = tgcn::load_config_file(c.config_file);
        if (!c.dataset.empty() && tgcn::dataset_from_string(c.dataset) != cfg.dataset)
            throw tgcn::ConfigError("--dataset contradicts the config file");
    } else if (!c.dataset.empty()) {
        cfg = tgcn::ExperimentConfig::defaults(tgcn::dataset_from_string(c.dataset));
    } else {
        throw tgcn::ConfigError("provide --config or --dataset");
    }
    if (!c.data_path.empty()) cfg.data_path = c.data_path;
    if (!c.cache_path.empty()) cfg.cache_path = c.cache_path;
    if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
    if (c.iterations >= 0) cfg.iterations = c.iterations;
    if (c.bandwidth >= 0) cfg.bandwidth = c.bandwidth;
    if (c.edge_life >= 0) cfg.edge_life = c.edge_life;
    if (c.layers >= 0) cfg.layer_count = c.layers;
    if (c.out_features >= 0) cfg.out_features = c.out_features;
    if (c.eval_interval >= 0) cfg.eval_interval = c.eval_interval;
    if (c.s_train >= 0) cfg.split.s_train = c.s_train;
    if (c.s_val >= 0) cfg.split.s_val = c.s_val;
    if (c.s_test >= 0) cfg.split.s_test = c.s_test;
    if (c.learning_rate >= 0.0) cfg.learning_rate = c.learning_rate;
    if (c.momentum >= 0.0) cfg.momentum = c.momentum;
    if (!c.metric.empty()) cfg.metric = c.metric;
    if (!c.activation.empty()) cfg.activation = c.activation;
    if (c.symmetrize >= 0) cfg.symmetrize = c.symmetrize != 0;
    if (c.log_features >= 0) cfg.log_features = c.log_features != 0;
    if (c.normalize_loss >= 0) cfg.normalize_loss = c.normalize_loss != 0;
    if (!c.alpha.empty()) cfg.alpha = c.alpha;
    if (c.alpha0 >= 0.0) {
        if (cfg.classes() != 2) throw tgcn::ConfigError("--alpha0 needs a 2-class dataset");
        cfg.alpha = {c.alpha0, 1.0 - c.alpha0};
    }
    cfg.data_path = resolve_data_path(cfg.data_path);
    cfg.validate();
    return cfg;
}

int run_verify(const std::string& scope, const tgcn::VerifyOptions& opt,
               const std::string& report_path, const std::string& csv_path,
               const std::string& dataset_config) {
    std::vector<tgcn::PropertyResult> results;
    auto extend = [&results](std::vector<tgcn::PropertyResult> part) {
        results.insert(results.end(), part.begin(), part.end());
    };
    if (scope == "algebra" || scope == "all") extend(tgcn::verify_algebra(opt));
    if (scope == "spectral" || scope == "all") extend(tgcn::verify_spectral(opt));
    if (scope == "gradients" || scope == "all") extend(tgcn::verify_gradients(opt));
    if (scope != "algebra" && scope != "spectral" && scope != "gradients" && scope != "all")
        throw tgcn::ConfigError("unknown verify scope: " + scope);

    if ((scope == "spectral" || scope == "all") && !dataset_config.empty()) {
        tgcn::ExperimentConfig cfg = tgcn::load_config_file(dataset_config);
        cfg.data_path = resolve_data_path(cfg.data_path);
        results.push_back(tgcn::dataset_bound_check(cfg));
    }

    const std::string table = tgcn::format_property_table(results);
    std::fputs(table.c_str(), stdout);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << table;
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << tgcn::property_csv(results);
    }
    return tgcn::all_passed(results) ? kExitOk : kExitPropertyFailure;
}

int run_train(const ConfigCli& cli, bool sweep) {
    const tgcn::ExperimentConfig cfg = build_config(cli);
    const tgcn::ExperimentData data = tgcn::prepare_experiment(cfg);
    std::printf("ingested %s: nodes=%ld edges=%ld steps=%d\n", tgcn::to_string(cfg.dataset).c_str(),
                data.stats.nodes, data.stats.edges, data.stats.depth);
    const tgcn::RunOutput out = sweep ? tgcn::run_sweep(cfg, data.prepared)
                                      : tgcn::run_single(cfg, data.prepared, cfg.resolved_alpha());
    tgcn::write_run_artifacts(cli.out_dir, cfg, out);
    std::fputs(tgcn::format_report(out.report).c_str(), stdout);
    std::printf("artifacts written to %s\n", cli.out_dir.c_str());
    return kExitOk;
}

int run_eval(const std::string& checkpoint_path, const ConfigCli& cli) {
    const tgcn::ExperimentConfig cfg = build_config(cli);
    const tgcn::Checkpoint ck = tgcn::load_checkpoint(checkpoint_path);
    if (ck.config_hash != tgcn::config_hash(cfg))
        std::fprintf(stderr,
                     "warning: config hash %s differs from the checkpoint's %s; "
                     "metric may not match the original run\n",
                     tgcn::config_hash(cfg).c_str(), ck.config_hash.c_str());
    const tgcn::ExperimentData data = tgcn::prepare_experiment(cfg);
    const double metric = tgcn::test_metric(cfg, data.prepared, ck.state.params);
    std::printf("test_metric %.17g\n", metric);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-graph embedding via the tensor M-product: verify, train, sweep, eval"};
    app.require_subcommand(1);

    std::string scope = "all";
    std::string report_path, csv_path, dataset_config;
    tgcn::VerifyOptions vopt;
    CLI::App* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--scope", scope, "algebra | spectral | gradients | all");
    verify->add_option("--seed", vopt.seed, "suite rng seed");
    verify->add_option("--trials", vopt.trials, "random instances per property");
    verify->add_option("--report", report_path, "write the plain-text report here");
    verify->add_option("--csv", csv_path, "write the csv report here");
    verify->add_option("--dataset-config", dataset_config,
                       "also run the spectral bound on this experiment config");
    verify->add_flag("--inject-fault", vopt.inject_fault,
                     "corrupt the round-trip check (verifies failure reporting)");

    ConfigCli train_cli;
    CLI::App* train = app.add_subcommand("train", "train once with a single class weighting");
    add_config_options(train, train_cli);

    ConfigCli sweep_cli;
    CLI::App* sweep = app.add_subcommand("sweep", "train across the class-weight grid");
    add_config_options(sweep, sweep_cli);

    ConfigCli eval_cli;
    std::string checkpoint_path;
    CLI::App* eval = app.add_subcommand("eval", "recompute the test metric of a checkpoint");
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint.json path")->required();
    add_config_options(eval, eval_cli);

    try {
        app.parse(argc, argv);
        if (verify->parsed()) return run_verify(scope, vopt, report_path, csv_path, dataset_config);
        if (train->parsed()) return run_train(train_cli, false);
        if (sweep->parsed()) return run_train(sweep_cli, true);
        if (eval->parsed()) return run_eval(checkpoint_path, eval_cli);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const tgcn::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const tgcn::ShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const tgcn::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const tgcn::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitOk;
}
