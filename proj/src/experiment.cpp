#include "tsk/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "tsk/error.hpp"
#include "tsk/metrics.hpp"
#include "tsk/serialize.hpp"

namespace tsk {

namespace {

// Prefix any failure with the pipeline stage so CLI users see where a run
// died, not just why.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw Error(std::string("stage '") + name + "' failed: " + e.what());
    }
}

int thread_cap() {
    if (const char* env = std::getenv("TSK_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
}

std::string epoch_log_csv(const std::vector<EpochLog>& log) {
    std::string csv = "epoch,train_batch_loss,test_rmse\n";
    for (const EpochLog& entry : log) {
        csv += std::to_string(entry.epoch);
        csv += ',';
        csv += format_double(entry.train_batch_loss);
        csv += ',';
        csv += format_double(entry.test_rmse);
        csv += '\n';
    }
    return csv;
}

std::string prune_history_csv(const std::vector<PruneRecord>& history) {
    std::string csv =
        "iteration,rules_before,removed_by_gamma,removed_by_theta,rules_after,test_rmse\n";
    for (const PruneRecord& row : history) {
        csv += std::to_string(row.iteration);
        csv += ',';
        csv += std::to_string(row.rules_before);
        csv += ',';
        csv += std::to_string(row.removed_by_gamma);
        csv += ',';
        csv += std::to_string(row.removed_by_theta);
        csv += ',';
        csv += std::to_string(row.rules_after);
        csv += ',';
        csv += format_double(row.test_rmse);
        csv += '\n';
    }
    return csv;
}

// The model file carries the preprocessing statistics and split spec next to
// the model itself so a saved model can be re-evaluated standalone.
std::string run_model_json(const TskModel& model, const PreprocessingParams& prep,
                           double train_fraction, std::uint64_t seed) {
    nlohmann::json doc = model_to_json(model);
    doc["preprocessing"] = {{"feature_means", prep.feature_means},
                            {"feature_stds", prep.feature_stds},
                            {"target_mean", prep.target_mean},
                            {"kept_columns", prep.kept_columns}};
    doc["split"] = {{"train_fraction", train_fraction}, {"seed", seed}};
    return doc.dump(2) + "\n";
}

struct RunOutput {
    RunRecord record;
    std::vector<EpochLog> epochs;
    std::vector<PruneRecord> history; // empty in train mode
    std::string model_json;
};

RunOutput execute_run(const Dataset& data, const ExperimentConfig& config, int repeat) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(repeat);
    Rng rng(seed);

    const auto [train_idx, test_idx] = stage("split", [&] {
        return split_indices(data.features.rows(), config.train_fraction, rng);
    });

    Dataset train_raw = subset(data, train_idx);
    Dataset test_raw = subset(data, test_idx);
    PreprocessingParams prep;
    const Dataset train_set = stage("preprocess", [&] {
        auto [normalized, params] = fit_transform(train_raw);
        prep = std::move(params);
        return normalized;
    });
    const Dataset test_set =
        stage("preprocess", [&] { return apply_preprocessing(prep, test_raw); });

    RunOutput out;
    out.record.repeat = repeat;
    out.record.seed = seed;

    if (config.mode == ExperimentMode::train) {
        TrainResult result = stage("train", [&] {
            return train(train_set.features, train_set.targets, test_set.features,
                         test_set.targets, config.train, rng);
        });
        out.epochs = std::move(result.log);
        out.record.final_rules = result.model.num_rules();
        out.record.final_rmse = rmse(predict_batch(result.model, test_set.features),
                                     test_set.targets);
        out.model_json =
            run_model_json(result.model, prep, config.train_fraction, seed);
    } else {
        PruneConfig prune;
        prune.initial_rules = config.train.num_rules;
        prune.total_epochs = config.train.epochs;
        prune.firing_threshold = config.firing_threshold;
        prune.similarity_threshold = config.similarity_threshold;
        prune.prune_iterations = config.prune_iterations;
        prune.inner = config.train;
        PruneResult result = stage("prune", [&] {
            return prune_and_refine(train_set.features, train_set.targets,
                                    test_set.features, test_set.targets, prune, rng);
        });
        out.epochs = std::move(result.epochs);
        out.history = std::move(result.history);
        out.record.final_rules = result.model.num_rules();
        out.record.final_rmse = rmse(predict_batch(result.model, test_set.features),
                                     test_set.targets);
        out.model_json =
            run_model_json(result.model, prep, config.train_fraction, seed);
    }
    return out;
}

void write_run_files(const std::filesystem::path& dir, int repeat,
                     const RunOutput& out) {
    const std::string base = "run" + std::to_string(repeat);
    write_text_file(dir / (base + "_log.csv"), epoch_log_csv(out.epochs));
    if (!out.history.empty()) {
        write_text_file(dir / (base + "_prune.csv"), prune_history_csv(out.history));
    }
    write_text_file(dir / (base + "_model.json"), out.model_json);
}

} // namespace

void ExperimentConfig::validate() const {
    train.validate();
    if (repeats < 1)
        throw ConfigError("repeats must be positive, got " + std::to_string(repeats));
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw ConfigError("train_fraction must lie in (0, 1), got " +
                          std::to_string(train_fraction));
    if (mode == ExperimentMode::prune) {
        PruneConfig prune;
        prune.initial_rules = train.num_rules;
        prune.total_epochs = train.epochs;
        prune.firing_threshold = firing_threshold;
        prune.similarity_threshold = similarity_threshold;
        prune.prune_iterations = prune_iterations;
        prune.inner = train;
        prune.validate();
    }
}

ExperimentSummary run_experiment(const Dataset& data, const ExperimentConfig& config) {
    config.validate();
    if (data.features.rows() < 2) throw DataError("need at least 2 samples to split");

    const std::filesystem::path out_dir = config.out_dir;
    if (!config.out_dir.empty()) std::filesystem::create_directories(out_dir);

    std::vector<RunOutput> outputs(static_cast<std::size_t>(config.repeats));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(config.repeats));
    std::atomic<int> next{0};

    const int workers = std::min(config.repeats, thread_cap());
    auto work = [&] {
        for (int r = next.fetch_add(1); r < config.repeats; r = next.fetch_add(1)) {
            try {
                outputs[static_cast<std::size_t>(r)] = execute_run(data, config, r);
                if (!config.out_dir.empty()) {
                    write_run_files(out_dir, r, outputs[static_cast<std::size_t>(r)]);
                }
            } catch (...) {
                failures[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    ExperimentSummary summary;
    summary.per_run.reserve(static_cast<std::size_t>(config.repeats));
    double rmse_sum = 0.0;
    double rules_sum = 0.0;
    for (const RunOutput& out : outputs) {
        summary.per_run.push_back(out.record);
        rmse_sum += out.record.final_rmse;
        rules_sum += out.record.final_rules;
    }
    summary.mean_rmse = rmse_sum / config.repeats;
    summary.mean_final_rules = rules_sum / config.repeats;
    double variance = 0.0;
    for (const RunOutput& out : outputs) {
        const double d = out.record.final_rmse - summary.mean_rmse;
        variance += d * d;
    }
    summary.std_rmse = std::sqrt(variance / config.repeats);

    if (!config.out_dir.empty()) {
        write_text_file(out_dir / "summary.json", summary_to_json(summary));
    }
    return summary;
}

std::string summary_to_json(const ExperimentSummary& summary) {
    nlohmann::json doc;
    doc["mean_rmse"] = summary.mean_rmse;
    doc["std_rmse"] = summary.std_rmse;
    doc["mean_final_rules"] = summary.mean_final_rules;
    doc["per_run"] = nlohmann::json::array();
    for (const RunRecord& run : summary.per_run) {
        doc["per_run"].push_back({{"repeat", run.repeat},
                                  {"seed", run.seed},
                                  {"final_rmse", run.final_rmse},
                                  {"final_rules", run.final_rules}});
    }
    return doc.dump(2) + "\n";
}

double evaluate_model_file(const std::string& model_path, const Dataset& data,
                           const double* split_fraction, const std::uint64_t* seed) {
    std::ifstream in(model_path);
    if (!in) throw DataError("cannot open model file " + model_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file " + model_path + " is not valid JSON: " + e.what());
    }

    const TskModel model = model_from_json(doc);

    if (!doc.contains("preprocessing") || !doc.contains("split")) {
        throw DataError("model file " + model_path +
                        " lacks the preprocessing/split records needed to evaluate");
    }
    PreprocessingParams prep;
    try {
        const auto& p = doc.at("preprocessing");
        prep.feature_means = p.at("feature_means").get<std::vector<double>>();
        prep.feature_stds = p.at("feature_stds").get<std::vector<double>>();
        prep.target_mean = p.at("target_mean").get<double>();
        prep.kept_columns = p.at("kept_columns").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file " + model_path +
                        " has a malformed preprocessing record: " + e.what());
    }

    double fraction = 0.7;
    std::uint64_t split_seed = 0;
    try {
        fraction = doc.at("split").at("train_fraction").get<double>();
        split_seed = doc.at("split").at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file " + model_path +
                        " has a malformed split record: " + e.what());
    }
    if (split_fraction != nullptr) fraction = *split_fraction;
    if (seed != nullptr) split_seed = *seed;

    const auto [train_idx, test_idx] =
        split_indices(data.features.rows(), SplitSpec{fraction, split_seed});
    const Dataset test_set = apply_preprocessing(prep, subset(data, test_idx));
    if (test_set.features.cols() != model.num_features()) {
        throw ShapeError("model expects " + std::to_string(model.num_features()) +
                         " features but dataset provides " +
                         std::to_string(test_set.features.cols()) +
                         " after preprocessing");
    }
    return rmse(predict_batch(model, test_set.features), test_set.targets);
}

} // namespace tsk
