// askls: train/predict/eval/cv/graph-eval for the asymmetric-kernel LS-SVM.

#include "askls/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

void add_common_flags(CLI::App* cmd, askls::RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "key = value config file (flags override file)");
    cmd->add_option("--data", cfg.data, "tabular CSV with a header row");
    cmd->add_option("--labels", cfg.labels, "id,label CSV (graph / precomputed kernels)");
    cmd->add_option("--edges", cfg.edges, "edge list: `src dst` per line, `#nodes N` directive");
    cmd->add_option("--precomputed", cfg.precomputed, "dense kernel/divergence matrix CSV");
    cmd->add_option("--label-col", cfg.label_col, "label column name (default: label)");
    cmd->add_option("--kernel", cfg.kernel, "rbf|sne|t|klexp|precomputed|adjacency");
    cmd->add_option("--sigma", cfg.sigma, "RBF/SNE length scale");
    cmd->add_option("--a", cfg.a, "KL kernel scale");
    cmd->add_option("--gamma", cfg.gamma, "regularization parameter");
    cmd->add_option("--model", cfg.model, "askls|lssvm");
    cmd->add_option("--merge", cfg.merge, "avg|source|target");
    cmd->add_option("--trials", cfg.trials, "number of repeated trials");
    cmd->add_option("--seed", cfg.seed, "base RNG seed; trial t uses seed+t");
    cmd->add_option("--train-frac", cfg.train_frac, "train fraction for splits");
    cmd->add_option("--folds", cfg.folds, "cross-validation folds");
    cmd->add_option("--standardize", cfg.standardize, "on|off (default on)");
    cmd->add_option("--out", cfg.out, "output path (model file, or report prefix)");
    cmd->add_option("--model-file", cfg.model_file, "model file to load (predict)");
    cmd->add_option("--gammas", cfg.gammas, "CV grid for gamma (comma separated)")->delimiter(',');
    cmd->add_option("--params", cfg.kernel_params,
                    "CV grid for the kernel parameter (sigma or a), comma separated")
        ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Asymmetric-kernel least-squares SVM.\n"
        "Precedence: command-line flag > config file > built-in default."};
    app.require_subcommand(1);

    askls::RunConfig cfg;
    std::string config_path;
    for (const char* name : {"train", "predict", "eval", "cv", "graph-eval"}) {
        auto* sub = app.add_subcommand(name);
        add_common_flags(sub, cfg, config_path);
        sub->callback([&cfg, name] { cfg.command = name; });
    }

    try {
        // Two-pass parse so file values sit between defaults and flags.
        app.parse(argc, argv);
        if (!config_path.empty()) {
            askls::RunConfig file_cfg;
            askls::load_config_file(file_cfg, config_path);
            file_cfg.command = cfg.command;
            cfg = file_cfg;
            app.clear();
            app.parse(argc, argv);
        }
        return askls::run_command(cfg);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return askls::kExitConfig;
    } catch (const std::exception& e) {
        return askls::report_error_and_code(e);
    }
}
