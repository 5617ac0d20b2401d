#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsk/dataset.hpp"
#include "tsk/pruner.hpp"
#include "tsk/trainer.hpp"

namespace tsk {

enum class ExperimentMode { train, prune };

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::train;
    TrainConfig train;   // also the inner config in prune mode
    double firing_threshold = 0.5;
    double similarity_threshold = 0.5;
    int prune_iterations = 3;
    int repeats = 1;
    std::uint64_t base_seed = 0;
    double train_fraction = 0.7;
    std::string out_dir; // empty: keep everything in memory

    void validate() const;
};

struct RunRecord {
    int repeat = 0;
    std::uint64_t seed = 0;
    double final_rmse = 0.0;
    int final_rules = 0;
};

struct ExperimentSummary {
    double mean_rmse = 0.0;
    double std_rmse = 0.0;
    double mean_final_rules = 0.0;
    std::vector<RunRecord> per_run;
};

/// Run `repeats` independent experiments on the dataset. Repeat r uses seed
/// base_seed + r for one stream covering split, initialization, batch
/// sampling, and DropRule. With an output directory set, each run writes its
/// epoch log (run<r>_log.csv), pruning history in prune mode
/// (run<r>_prune.csv), and final model (run<r>_model.json); the aggregate
/// lands in summary.json. Repeats run in parallel up to the TSK_THREADS
/// environment variable (default: hardware concurrency).
ExperimentSummary run_experiment(const Dataset& data, const ExperimentConfig& config);

/// Serialize the summary exactly as written to summary.json.
std::string summary_to_json(const ExperimentSummary& summary);

/// Test RMSE of a saved model against a dataset. The model file's recorded
/// preprocessing and split are reapplied so the result matches the run that
/// produced it; pass split_fraction/seed to re-evaluate under a different
/// split.
double evaluate_model_file(const std::string& model_path, const Dataset& data,
                           const double* split_fraction = nullptr,
                           const std::uint64_t* seed = nullptr);

} // namespace tsk
