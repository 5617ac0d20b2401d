// Release gate: eleven numbered end-to-end checks covering the gradient
// oracles, inference invariants, optimizer bounds, training behavior,
// pruning trends, and CLI determinism. Run with criterion numbers as
// arguments (e.g. `acceptance 1 4 9`) or with none to run the full gate.
// Each check prints exactly one [PASS]/[FAIL] line; the exit code is
// nonzero if any selected check fails.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/finite_diff.hpp"
#include "support/generators.hpp"
#include "tsk/dataset.hpp"
#include "tsk/init.hpp"
#include "tsk/pruner.hpp"
#include "tsk/synthetic.hpp"
#include "tsk/trainer.hpp"

using namespace tsk;
using namespace tsk::testing;

namespace {

std::string fmt(double value, const char* spec = "%.4g") {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, spec, value);
    return buffer;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ =
        std::chrono::steady_clock::now();
};

unsigned thread_cap() {
    if (const char* env = std::getenv("TSK_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<unsigned>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Run fn(0) .. fn(count - 1) across a worker pool; any exception is
// rethrown on the caller after all workers finish.
void parallel_seeds(int count, const std::function<void(int)>& fn) {
    const unsigned workers =
        std::min(thread_cap(), static_cast<unsigned>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto drain = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& error : errors)
        if (error) std::rethrow_exception(error);
}

// Benchmark-scale synthetic regression tables. Sizes mirror two mid-size
// tabular benchmarks (1030 x 8 and 1503 x 5); the responses are blob-local
// affine maps, so a moderate rule base fits them and pruning has real
// redundancy to remove.
Dataset concrete_scale() { return make_blob_dataset({1030, 8, 4, 0.4, 2024}); }
Dataset airfoil_scale() { return make_blob_dataset({1503, 5, 4, 0.4, 4048}); }

struct SplitData {
    Matrix X_train{1, 1};
    std::vector<double> y_train;
    Matrix X_test{1, 1};
    std::vector<double> y_test;
};

// 70/30 split plus train-fitted standardization, consuming rng exactly once
// for the split so the remaining stream drives initialization and training.
SplitData standardized_split(const Dataset& data, Rng& rng) {
    const auto [train_idx, test_idx] =
        split_indices(data.num_samples(), 0.7, rng);
    const auto [train_std, params] = fit_transform(subset(data, train_idx));
    const Dataset test_std =
        apply_preprocessing(params, subset(data, test_idx));
    return {train_std.features, train_std.targets, test_std.features,
            test_std.targets};
}

TrainConfig benchmark_train_config(std::uint64_t seed) {
    TrainConfig config;
    config.num_rules = 32;
    config.epochs = 500;
    config.batch_size = 64;
    config.droprule_keep = 0.5;
    config.init_lr = 0.01;
    config.l2_lambda = 0.05;
    config.seed = seed;
    return config;
}

PruneConfig benchmark_prune_config(std::uint64_t seed) {
    PruneConfig config;
    config.initial_rules = 32;
    config.total_epochs = 500;
    config.firing_threshold = 0.5;
    config.similarity_threshold = 0.5;
    config.prune_iterations = 3;
    config.inner = benchmark_train_config(seed);
    return config;
}

double mean_of(const std::vector<double>& values) {
    double total = 0.0;
    for (const double v : values) total += v;
    return total / static_cast<double>(values.size());
}

// --- criterion 1 / 2: gradient oracles ------------------------------------

bool gradient_oracle(MfType family, double rel_tol, std::string& detail) {
    const Stopwatch clock;
    Rng rng(family == MfType::gaussian ? 101 : 202);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int R = 1 + static_cast<int>(rng.below(3));
        const int M = 1 + static_cast<int>(rng.below(3));
        const int batch = 1 + static_cast<int>(rng.below(8));
        const double lambda = trial % 2 == 0 ? 0.0 : 0.05;
        const TskModel model = family == MfType::gaussian
                                   ? random_gaussian_model(R, M, rng)
                                   : random_trapezoid_model(R, M, rng);
        const Matrix X = family == MfType::gaussian
                             ? random_batch(batch, M, rng)
                             : trapezoid_probe_batch(model, batch, rng);
        const std::vector<double> y = random_targets(batch, rng);
        const std::vector<std::uint8_t> masks(
            static_cast<std::size_t>(batch) * static_cast<std::size_t>(R), 1);

        const std::vector<double> analytic =
            family == MfType::gaussian
                ? gaussian_gradients(model, X, y, masks, lambda)
                : trapezoid_gradients(model, X, y, masks, lambda);
        const std::vector<double> numeric =
            finite_difference_gradients(model, X, y, masks, lambda, 1e-6);

        const GradientMismatch verdict =
            compare_gradients(analytic, numeric, rel_tol, 1e-8);
        if (!verdict.ok) {
            detail = "trial " + std::to_string(trial) + ", " + verdict.describe();
            return false;
        }
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double diff = std::abs(analytic[i] - numeric[i]);
            if (diff <= 1e-8) continue; // inside the absolute floor
            const double scale =
                std::max(std::abs(analytic[i]), std::abs(numeric[i]));
            worst = std::max(worst, diff / scale);
        }
    }
    const double elapsed = clock.seconds();
    detail = "100 models, worst rel err " + fmt(worst, "%.2e") + ", " +
             fmt(elapsed, "%.1f") + " s";
    return elapsed < 10.0;
}

// --- criterion 3: inference invariants -------------------------------------

bool inference_invariants(std::string& detail) {
    Rng rng(1003);
    int degenerate_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const bool gaussian = trial % 2 == 0;
        const int R = 1 + static_cast<int>(rng.below(5));
        const int M = 1 + static_cast<int>(rng.below(4));
        const TskModel model = gaussian ? random_gaussian_model(R, M, rng)
                                        : random_trapezoid_model(R, M, rng);
        std::vector<double> x(static_cast<std::size_t>(M));
        const bool far_away = rng.uniform() < 0.15;
        for (double& v : x)
            v = far_away ? rng.uniform(15.0, 30.0) : rng.uniform(-2.5, 2.5);

        for (int r = 0; r < R; ++r) {
            for (int m = 0; m < M; ++m) {
                const double mu = membership(
                    model.rule(r).antecedents[static_cast<std::size_t>(m)],
                    x[static_cast<std::size_t>(m)]);
                if (!(mu >= 0.0 && mu <= 1.0)) {
                    detail = "membership grade " + fmt(mu) + " outside [0, 1]";
                    return false;
                }
            }
        }

        std::vector<double> firing(static_cast<std::size_t>(R));
        firing_levels(model, x, firing);
        double firing_sum = 0.0;
        for (const double f : firing) firing_sum += f;
        if (firing_sum <= kFiringEpsilon) ++degenerate_seen;

        const std::vector<double> normalized = normalized_firing_levels(firing);
        double norm_sum = 0.0;
        for (const double f : normalized) {
            if (f < 0.0) {
                detail = "negative normalized firing level";
                return false;
            }
            norm_sum += f;
        }
        if (std::abs(norm_sum - 1.0) > 1e-12) {
            detail = "normalized levels sum to " + fmt(norm_sum, "%.17g");
            return false;
        }

        double lowest = std::numeric_limits<double>::infinity();
        double highest = -lowest;
        for (int r = 0; r < R; ++r) {
            const double out = rule_output(model.rule(r), x);
            lowest = std::min(lowest, out);
            highest = std::max(highest, out);
        }
        const double prediction = predict(model, x);
        const double slack =
            1e-9 * std::max({1.0, std::abs(lowest), std::abs(highest)});
        if (prediction < lowest - slack || prediction > highest + slack) {
            detail = "prediction " + fmt(prediction) +
                     " escapes the rule-output hull [" + fmt(lowest) + ", " +
                     fmt(highest) + "]";
            return false;
        }

        std::vector<Rule> reversed(model.rules().rbegin(), model.rules().rend());
        const TskModel permuted(std::move(reversed), M);
        if (std::abs(predict(permuted, x) - prediction) > 1e-10) {
            detail = "rule order changed the prediction";
            return false;
        }
    }
    if (degenerate_seen == 0) {
        detail = "no degenerate firing case was exercised";
        return false;
    }
    detail = "1000 pairs, " + std::to_string(degenerate_seen) +
             " degenerate firing cases included";
    return true;
}

// --- criterion 4: AdaBound bound compliance ---------------------------------

bool adabound_compliance(std::string& detail) {
    const auto first = adabound_bounds(1);
    if (std::abs(first.lower - 9.99000999000999e-6) > 1e-12 ||
        std::abs(first.upper - 10.01) > 1e-9) {
        detail = "step-1 bounds [" + fmt(first.lower, "%.12g") + ", " +
                 fmt(first.upper, "%.12g") + "] miss the hand-derived values";
        return false;
    }
    const auto late = adabound_bounds(1000000000);
    if (!(late.lower < 0.01 && late.upper > 0.01) ||
        std::abs(late.lower - 0.01) > 1e-6 || std::abs(late.upper - 0.01) > 1e-6) {
        detail = "late-step bounds do not converge to the base rate";
        return false;
    }

    const Dataset data = make_blob_dataset({400, 4, 5, 0.2, 31});
    Rng rng(31);
    const SplitData split = standardized_split(data, rng);
    TrainConfig config = benchmark_train_config(31);
    config.num_rules = 8;

    long checked = 0;
    long violations = 0;
    const EpochObserver observer = [&](int epoch, const TskModel&,
                                       const std::vector<double>& rates) {
        const auto [lower, upper] = adabound_bounds(epoch);
        for (const double rate : rates) {
            ++checked;
            if (rate < lower || rate > upper) ++violations;
        }
    };
    train(split.X_train, split.y_train, split.X_test, split.y_test, config, rng,
          nullptr, observer);

    detail = std::to_string(checked) + " rates over 500 epochs, " +
             std::to_string(violations) + " outside the bounds";
    return checked == 500L * 8L * (2 * 4 + 1 + 4) && violations == 0;
}

// --- criterion 5: trapezoid order through training --------------------------

bool trapezoid_order_through_training(std::string& detail) {
    const Dataset data = airfoil_scale();
    Rng rng(7);
    const SplitData split = standardized_split(data, rng);
    TrainConfig config = benchmark_train_config(7);
    config.mf_type = MfType::trapezoid;

    long checked = 0;
    long violations = 0;
    const EpochObserver observer = [&](int, const TskModel& model,
                                       const std::vector<double>&) {
        for (int r = 0; r < model.num_rules(); ++r) {
            for (const auto& mf : model.rule(r).antecedents) {
                const auto& t = std::get<TrapezoidMf>(mf);
                ++checked;
                if (!(t.a < t.b && t.b <= t.c && t.c < t.d)) ++violations;
            }
        }
    };
    train(split.X_train, split.y_train, split.X_test, split.y_test, config, rng,
          nullptr, observer);

    detail = std::to_string(checked) + " membership functions checked, " +
             std::to_string(violations) + " out of order";
    return checked == 500L * 32L * 5L && violations == 0;
}

// --- criterion 6: linear recovery -------------------------------------------

bool linear_recovery(std::string& detail) {
    const Dataset data = make_linear_dataset(500, 6);
    Rng rng(6);
    const auto [train_idx, test_idx] = split_indices(500, 0.7, rng);
    const Dataset train_set = subset(data, train_idx);
    const Dataset test_set = subset(data, test_idx);

    TrainConfig config;
    config.num_rules = 2;
    config.epochs = 500;
    config.batch_size = 64;
    config.droprule_keep = 1.0;
    config.l2_lambda = 0.0;

    const Stopwatch clock;
    const TrainResult result =
        train(train_set.features, train_set.targets, test_set.features,
              test_set.targets, config, rng);
    const double elapsed = clock.seconds();
    const double final_rmse = result.log.back().test_rmse;

    detail = "test rmse " + fmt(final_rmse) + ", " + fmt(elapsed, "%.1f") + " s";
    return final_rmse < 0.05 && elapsed < 30.0;
}

// --- criterion 7: pruning effectiveness -------------------------------------

bool pruning_effectiveness(std::string& detail) {
    const Dataset data = concrete_scale();
    const int seeds = 10;
    std::vector<double> pruned_rmse(seeds);
    std::vector<double> pruned_rules(seeds);
    std::vector<double> full_rmse(seeds);

    parallel_seeds(seeds, [&](int s) {
        const auto seed = static_cast<std::uint64_t>(s + 1);
        {
            Rng rng(seed);
            const SplitData split = standardized_split(data, rng);
            const PruneResult result = prune_and_refine(
                split.X_train, split.y_train, split.X_test, split.y_test,
                benchmark_prune_config(seed), rng);
            pruned_rmse[static_cast<std::size_t>(s)] =
                result.history.back().test_rmse;
            pruned_rules[static_cast<std::size_t>(s)] = result.model.num_rules();
        }
        {
            Rng rng(seed);
            const SplitData split = standardized_split(data, rng);
            const TrainResult result =
                train(split.X_train, split.y_train, split.X_test, split.y_test,
                      benchmark_train_config(seed), rng);
            full_rmse[static_cast<std::size_t>(s)] = result.log.back().test_rmse;
        }
    });

    const double mean_rules = mean_of(pruned_rules);
    const double mean_pruned = mean_of(pruned_rmse);
    const double mean_full = mean_of(full_rmse);
    detail = "mean rules " + fmt(mean_rules) + " (from 32), pruned rmse " +
             fmt(mean_pruned) + " vs full " + fmt(mean_full) + " (ratio " +
             fmt(mean_pruned / mean_full, "%.3f") + ")";
    return mean_rules < 24.0 && mean_pruned <= 1.10 * mean_full;
}

// --- criterion 8: pruning versus direct small training ----------------------

bool prune_versus_direct(std::string& detail) {
    const struct {
        const char* name;
        Dataset data;
    } tables[] = {{"1030x8", concrete_scale()}, {"1503x5", airfoil_scale()}};

    std::ostringstream report;
    bool ok = true;
    for (const auto& table : tables) {
        const int seeds = 10;
        std::vector<double> pruned_rmse(seeds);
        std::vector<double> direct_rmse(seeds);

        parallel_seeds(seeds, [&](int s) {
            const auto seed = static_cast<std::uint64_t>(s + 1);
            int rules_after = 0;
            {
                Rng rng(seed);
                const SplitData split = standardized_split(table.data, rng);
                const PruneResult result = prune_and_refine(
                    split.X_train, split.y_train, split.X_test, split.y_test,
                    benchmark_prune_config(seed), rng);
                pruned_rmse[static_cast<std::size_t>(s)] =
                    result.history.back().test_rmse;
                rules_after = result.model.num_rules();
            }
            {
                Rng rng(seed);
                const SplitData split = standardized_split(table.data, rng);
                TrainConfig config = benchmark_train_config(seed);
                config.num_rules = rules_after;
                const TrainResult result =
                    train(split.X_train, split.y_train, split.X_test,
                          split.y_test, config, rng);
                direct_rmse[static_cast<std::size_t>(s)] =
                    result.log.back().test_rmse;
            }
        });

        const double ratio = mean_of(pruned_rmse) / mean_of(direct_rmse);
        if (!report.str().empty()) report << ", ";
        report << table.name << " ratio " << fmt(ratio, "%.3f");
        ok = ok && ratio <= 1.05;
    }
    detail = report.str();
    return ok;
}

// --- criterion 9: Jaccard oracle --------------------------------------------

bool jaccard_oracle(std::string& detail) {
    Rng rng(909);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(32));
        std::vector<double> a(static_cast<std::size_t>(n));
        std::vector<double> b(static_cast<std::size_t>(n));
        const bool silence_a = rng.uniform() < 0.05;
        const bool silence_b = rng.uniform() < 0.05;
        for (int i = 0; i < n; ++i) {
            a[static_cast<std::size_t>(i)] =
                silence_a || rng.uniform() < 0.2 ? 0.0 : rng.uniform();
            b[static_cast<std::size_t>(i)] =
                silence_b || rng.uniform() < 0.2 ? 0.0 : rng.uniform();
        }

        double smaller = 0.0;
        double larger = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = a[static_cast<std::size_t>(i)];
            const double y = b[static_cast<std::size_t>(i)];
            if (x < y) {
                smaller += x;
                larger += y;
            } else {
                smaller += y;
                larger += x;
            }
        }
        const double reference = larger > 0.0 ? smaller / larger : 0.0;
        const double diff = std::abs(jaccard_similarity(a, b) - reference);
        worst = std::max(worst, diff);
        if (diff > 1e-12) {
            detail = "trial " + std::to_string(trial) + " differs by " +
                     fmt(diff, "%.2e");
            return false;
        }
    }
    detail = "1000 pairs, worst deviation " + fmt(worst, "%.2e");
    return true;
}

// --- criterion 10: CLI determinism ------------------------------------------

bool cli_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path scratch =
        fs::temp_directory_path() /
        ("tsk_acceptance_cli_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    const fs::path csv = scratch / "table.csv";
    save_csv(make_blob_dataset({150, 3, 4, 0.15, 12}), csv.string(), false);

    auto run = [&](const fs::path& out_dir) {
        const std::string command =
            std::string(TSK_CLI_BINARY) + " --data " + csv.string() +
            " --mode prune --rules 8 --epochs 60 --batch-size 32" +
            " --prune-iters 3 --repeats 2 --seed 3 --out " + out_dir.string() +
            " > /dev/null 2>&1";
        return std::system(command.c_str());
    };

    const int first = run(scratch / "a");
    const int second = run(scratch / "b");
    if (first != 0 || second != 0) {
        detail = "cli exited with " + std::to_string(first) + " and " +
                 std::to_string(second);
        fs::remove_all(scratch);
        return false;
    }

    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };
    const std::string summary_a = slurp(scratch / "a" / "summary.json");
    const std::string summary_b = slurp(scratch / "b" / "summary.json");
    fs::remove_all(scratch);

    if (summary_a.empty() || summary_a != summary_b) {
        detail = "summaries differ across identical runs";
        return false;
    }
    detail = "two runs, byte-identical summary.json (" +
             std::to_string(summary_a.size()) + " bytes)";
    return true;
}

// --- criterion 11: epoch schedule -------------------------------------------

bool epoch_schedule_split(std::string& detail) {
    const std::vector<int> schedule = epoch_schedule(500, 3);
    detail = "epoch_schedule(500, 3) = [" + std::to_string(schedule[0]) + ", " +
             std::to_string(schedule[1]) + ", " + std::to_string(schedule[2]) +
             "]";
    return schedule == std::vector<int>{300, 100, 100};
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

const std::vector<Criterion>& gate() {
    static const std::vector<Criterion> criteria = {
        {1, "gaussian gradient oracle",
         [](std::string& d) { return gradient_oracle(MfType::gaussian, 1e-5, d); }},
        {2, "trapezoid gradient oracle",
         [](std::string& d) { return gradient_oracle(MfType::trapezoid, 1e-4, d); }},
        {3, "inference invariants", inference_invariants},
        {4, "adabound rate bounds", adabound_compliance},
        {5, "trapezoid order through training", trapezoid_order_through_training},
        {6, "linear recovery", linear_recovery},
        {7, "pruning effectiveness", pruning_effectiveness},
        {8, "prune versus direct training", prune_versus_direct},
        {9, "jaccard oracle", jaccard_oracle},
        {10, "cli determinism", cli_determinism},
        {11, "epoch schedule", epoch_schedule_split},
    };
    return criteria;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > static_cast<int>(gate().size())) {
            std::cerr << "error: unknown criterion '" << argv[i]
                      << "' (expected 1-" << gate().size() << ")\n";
            return 2;
        }
        selected.push_back(id);
    }
    if (selected.empty())
        for (const Criterion& c : gate()) selected.push_back(c.id);

    bool all_ok = true;
    for (const int id : selected) {
        const Criterion& criterion = gate()[static_cast<std::size_t>(id - 1)];
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id
                  << ": " << criterion.name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << '\n';
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
