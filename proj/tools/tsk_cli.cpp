// Command-line front end: trains or prunes TSK fuzzy regression models on a
// CSV dataset across repeated seeded runs, and re-evaluates saved models.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tsk/dataset.hpp"
#include "tsk/error.hpp"
#include "tsk/experiment.hpp"

namespace {

struct CliOptions {
    std::string data_path;
    std::string mf = "gaussian";
    std::string mode = "train";
    int rules = 32;
    int epochs = 500;
    int batch_size = 64;
    double lr = 0.01;
    double lambda = 0.05;
    double droprule = 0.5;
    double gamma = 0.5;
    double theta = 0.5;
    int prune_iters = 3;
    int repeats = 1;
    std::uint64_t seed = 0;
    double split = 0.7;
    std::string out_dir;
    std::string header = "no";
};

tsk::ExperimentConfig to_config(const CliOptions& opts) {
    tsk::ExperimentConfig config;
    config.mode = opts.mode == "prune" ? tsk::ExperimentMode::prune
                                       : tsk::ExperimentMode::train;
    config.train.mf_type = opts.mf == "trapezoid" ? tsk::MfType::trapezoid
                                                  : tsk::MfType::gaussian;
    config.train.num_rules = opts.rules;
    config.train.epochs = opts.epochs;
    config.train.batch_size = opts.batch_size;
    config.train.init_lr = opts.lr;
    config.train.l2_lambda = opts.lambda;
    config.train.droprule_keep = opts.droprule;
    config.train.seed = opts.seed;
    config.firing_threshold = opts.gamma;
    config.similarity_threshold = opts.theta;
    config.prune_iterations = opts.prune_iters;
    config.repeats = opts.repeats;
    config.base_seed = opts.seed;
    config.train_fraction = opts.split;
    config.out_dir = opts.out_dir;
    return config;
}

int run_experiment_command(const CliOptions& opts) {
    const tsk::Dataset data = tsk::load_csv(opts.data_path, opts.header == "yes");
    const tsk::ExperimentSummary summary =
        tsk::run_experiment(data, to_config(opts));
    std::cout << tsk::summary_to_json(summary);
    return 0;
}

int evaluate_command(const std::string& model_path, const std::string& data_path,
                     const std::string& header, const double* split,
                     const std::uint64_t* seed) {
    const tsk::Dataset data = tsk::load_csv(data_path, header == "yes");
    const double value = tsk::evaluate_model_file(model_path, data, split, seed);
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    std::cout << buffer << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TSK fuzzy regression: mini-batch training with DropRule and "
                 "AdaBound, plus rule-base pruning"};
    app.require_subcommand(0, 1);

    CliOptions opts;
    app.add_option("--data", opts.data_path, "CSV dataset; last column is the target");
    app.add_option("--mf", opts.mf, "Membership function family")
        ->check(CLI::IsMember({"gaussian", "trapezoid"}));
    app.add_option("--mode", opts.mode, "train: fit a fixed rule base; prune: "
                                        "train then shrink the rule base")
        ->check(CLI::IsMember({"train", "prune"}));
    app.add_option("--rules", opts.rules, "Rule count (initial count in prune mode)");
    app.add_option("--epochs", opts.epochs, "Training epochs (total across prune phases)");
    app.add_option("--batch-size", opts.batch_size, "Mini-batch size");
    app.add_option("--lr", opts.lr, "Initial learning rate");
    app.add_option("--lambda", opts.lambda, "L2 penalty on non-bias consequent weights");
    app.add_option("--droprule", opts.droprule, "Probability a rule keeps its firing level");
    app.add_option("--gamma", opts.gamma, "Firing-strength threshold (fraction of median)");
    app.add_option("--theta", opts.theta, "Jaccard similarity threshold for merging");
    app.add_option("--prune-iters", opts.prune_iters, "Pruning iterations");
    app.add_option("--repeats", opts.repeats, "Independent repeats (seeds seed..seed+N-1)");
    app.add_option("--seed", opts.seed, "Base seed");
    app.add_option("--split", opts.split, "Training fraction of the data");
    app.add_option("--out", opts.out_dir, "Directory for per-run logs, models, and summary.json");
    app.add_option("--header", opts.header, "Whether the CSV has a header row")
        ->check(CLI::IsMember({"yes", "no"}));

    std::string eval_model;
    std::string eval_data;
    std::string eval_header = "no";
    double eval_split = 0.0;
    std::uint64_t eval_seed = 0;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Test RMSE of a saved model on its recorded split");
    evaluate->add_option("--model", eval_model, "Model JSON written by a run")
        ->required();
    evaluate->add_option("--data", eval_data, "CSV dataset the model was trained on")
        ->required();
    evaluate->add_option("--header", eval_header, "Whether the CSV has a header row")
        ->check(CLI::IsMember({"yes", "no"}));
    CLI::Option* split_opt =
        evaluate->add_option("--split", eval_split, "Override the recorded training fraction");
    CLI::Option* seed_opt =
        evaluate->add_option("--seed", eval_seed, "Override the recorded split seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (evaluate->parsed()) {
            return evaluate_command(eval_model, eval_data, eval_header,
                                    split_opt->count() > 0 ? &eval_split : nullptr,
                                    seed_opt->count() > 0 ? &eval_seed : nullptr);
        }
        if (opts.data_path.empty()) {
            std::cerr << "error: --data is required (see --help)\n";
            return 1;
        }
        return run_experiment_command(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
