#include "tsk/pruner.hpp"

#include <algorithm>
#include <cmath>

#include "tsk/error.hpp"
#include "tsk/metrics.hpp"

namespace tsk {

namespace {

double median_of(std::vector<double> values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid),
                     values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower =
        *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
    return 0.5 * (lower + upper);
}

// Normalized firing level of every rule on every sample, R x N.
Matrix normalized_firing_table(const TskModel& model, const Matrix& X) {
    const int R = model.num_rules();
    Matrix table(R, X.rows());
    for (int n = 0; n < X.rows(); ++n) {
        const std::vector<double> levels = normalized_firing_levels(model, X.row(n));
        for (int r = 0; r < R; ++r) table(r, n) = levels[static_cast<std::size_t>(r)];
    }
    return table;
}

Matrix similarity_from_table(const Matrix& table) {
    const int R = table.rows();
    Matrix S(R, R);
    for (int i = 0; i < R; ++i) {
        for (int j = i + 1; j < R; ++j) {
            const double s = jaccard_similarity(table.row(i), table.row(j));
            S(i, j) = s;
            S(j, i) = s;
        }
    }
    return S;
}

// Largest off-diagonal entry, scanning the upper triangle so ties resolve to
// the smallest (i, j).
struct MaxEntry {
    double value = -1.0;
    int i = -1;
    int j = -1;
};

MaxEntry max_off_diagonal(const Matrix& S) {
    MaxEntry best;
    for (int i = 0; i < S.rows(); ++i) {
        for (int j = i + 1; j < S.cols(); ++j) {
            if (S(i, j) > best.value) best = {S(i, j), i, j};
        }
    }
    return best;
}

Matrix drop_row_col(const Matrix& S, int drop) {
    Matrix out(S.rows() - 1, S.cols() - 1);
    for (int i = 0, oi = 0; i < S.rows(); ++i) {
        if (i == drop) continue;
        for (int j = 0, oj = 0; j < S.cols(); ++j) {
            if (j == drop) continue;
            out(oi, oj) = S(i, j);
            ++oj;
        }
        ++oi;
    }
    return out;
}

double test_rmse_of(const TskModel& model, const Matrix& X_test,
                    std::span<const double> y_test) {
    if (y_test.empty()) return 0.0;
    return rmse(predict_batch(model, X_test), y_test);
}

} // namespace

void PruneConfig::validate() const {
    if (initial_rules < 1)
        throw ConfigError("initial_rules must be positive, got " +
                          std::to_string(initial_rules));
    if (prune_iterations < 2)
        throw ConfigError("prune_iterations must be at least 2, got " +
                          std::to_string(prune_iterations));
    if (total_epochs < prune_iterations)
        throw ConfigError("total_epochs must be at least prune_iterations, got " +
                          std::to_string(total_epochs));
    if (firing_threshold < 0.0)
        throw ConfigError("firing_threshold must be nonnegative, got " +
                          std::to_string(firing_threshold));
    if (!(similarity_threshold > 0.0) || !(similarity_threshold < 1.0))
        throw ConfigError("similarity_threshold must lie in (0, 1), got " +
                          std::to_string(similarity_threshold));
    inner.validate();
}

std::vector<int> epoch_schedule(int total_epochs, int iterations) {
    if (iterations < 2)
        throw ParameterError("schedule needs at least 2 iterations, got " +
                             std::to_string(iterations));
    if (total_epochs < iterations)
        throw ParameterError("schedule needs at least as many epochs as iterations");
    std::vector<int> schedule(static_cast<std::size_t>(iterations));
    schedule[0] = static_cast<int>(std::llround(0.6 * total_epochs));
    const int refine =
        static_cast<int>(std::llround(0.4 * total_epochs / (iterations - 1)));
    for (int t = 1; t < iterations; ++t) schedule[static_cast<std::size_t>(t)] = refine;
    return schedule;
}

std::vector<double> firing_strengths(const TskModel& model, const Matrix& X) {
    if (X.cols() != model.num_features()) {
        throw ShapeError("data has " + std::to_string(X.cols()) +
                         " features but model expects " +
                         std::to_string(model.num_features()));
    }
    std::vector<double> strengths(static_cast<std::size_t>(model.num_rules()), 0.0);
    for (int n = 0; n < X.rows(); ++n) {
        const std::vector<double> levels = normalized_firing_levels(model, X.row(n));
        for (std::size_t r = 0; r < strengths.size(); ++r) strengths[r] += levels[r];
    }
    return strengths;
}

std::vector<int> low_firing_filter(std::span<const double> strengths, double gamma) {
    if (strengths.empty()) throw ParameterError("no firing strengths given");
    const double threshold =
        gamma * median_of({strengths.begin(), strengths.end()});
    std::vector<int> kept;
    for (std::size_t r = 0; r < strengths.size(); ++r) {
        if (strengths[r] >= threshold) kept.push_back(static_cast<int>(r));
    }
    if (kept.empty()) {
        // A threshold above even the maximum must still leave one rule.
        kept.push_back(static_cast<int>(
            std::max_element(strengths.begin(), strengths.end()) -
            strengths.begin()));
    }
    return kept;
}

double jaccard_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("similarity inputs differ in length: " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    double min_sum = 0.0;
    double max_sum = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        min_sum += std::min(a[n], b[n]);
        max_sum += std::max(a[n], b[n]);
    }
    return max_sum > 0.0 ? min_sum / max_sum : 0.0;
}

Matrix build_similarity_matrix(const TskModel& model, const Matrix& X) {
    return similarity_from_table(normalized_firing_table(model, X));
}

void merge_rules(TskModel& model, std::vector<int>& merge_counts, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= model.num_rules() || j >= model.num_rules())
        throw ParameterError("invalid merge pair (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
    if (merge_counts.size() != static_cast<std::size_t>(model.num_rules()))
        throw ShapeError("merge counts out of step with the rule base");

    const double wi = merge_counts[static_cast<std::size_t>(i)];
    const double wj = merge_counts[static_cast<std::size_t>(j)];
    const double scale = 1.0 / (wi + wj);

    std::vector<double> params = model.parameters();
    const int stride = model.rule_stride();
    double* pi = params.data() + static_cast<std::size_t>(i) * stride;
    const double* pj = params.data() + static_cast<std::size_t>(j) * stride;
    for (int p = 0; p < stride; ++p) pi[p] = (wi * pi[p] + wj * pj[p]) * scale;
    model.set_parameters(params);

    model.remove_rule(j);
    merge_counts[static_cast<std::size_t>(i)] += 1;
    merge_counts.erase(merge_counts.begin() + j);
}

int merge_similar_rules(TskModel& model, std::vector<int>& merge_counts,
                        Matrix& S, double threshold) {
    int merges = 0;
    while (model.num_rules() > 1) {
        const MaxEntry top = max_off_diagonal(S);
        if (!(top.value > threshold)) break;

        merge_rules(model, merge_counts, top.i, top.j);

        // Maintain S by averaging the merged pair's row and column into
        // slot i, then dropping slot j.
        for (int k = 0; k < S.cols(); ++k)
            S(top.i, k) = 0.5 * (S(top.i, k) + S(top.j, k));
        for (int k = 0; k < S.rows(); ++k)
            S(k, top.i) = 0.5 * (S(k, top.i) + S(k, top.j));
        S = drop_row_col(S, top.j);
        for (int k = 0; k < S.rows(); ++k) S(k, k) = 0.0;

        ++merges;
    }
    return merges;
}

PruneResult prune_and_refine(const Matrix& X_train, std::span<const double> y_train,
                             const Matrix& X_test, std::span<const double> y_test,
                             const PruneConfig& config, Rng& rng) {
    config.validate();
    const std::vector<int> schedule =
        epoch_schedule(config.total_epochs, config.prune_iterations);

    TrainConfig phase = config.inner;
    phase.num_rules = config.initial_rules;
    phase.epochs = schedule[0];

    TrainResult trained =
        train(X_train, y_train, X_test, y_test, phase, rng, nullptr);
    TskModel model = std::move(trained.model);

    std::vector<PruneRecord> history;
    std::vector<EpochLog> epochs = std::move(trained.log);
    history.push_back({1, config.initial_rules, 0, 0, model.num_rules(),
                       test_rmse_of(model, X_test, y_test)});

    std::vector<int> merge_counts(static_cast<std::size_t>(model.num_rules()), 1);

    for (int t = 2; t <= config.prune_iterations; ++t) {
        const int rules_before = model.num_rules();

        const std::vector<double> strengths = firing_strengths(model, X_train);
        const std::vector<int> kept =
            low_firing_filter(strengths, config.firing_threshold);
        const int removed_by_gamma = rules_before - static_cast<int>(kept.size());
        if (removed_by_gamma > 0) {
            model = model.subset(kept);
            std::vector<int> kept_counts;
            kept_counts.reserve(kept.size());
            for (const int r : kept)
                kept_counts.push_back(merge_counts[static_cast<std::size_t>(r)]);
            merge_counts = std::move(kept_counts);
        }

        Matrix S = build_similarity_matrix(model, X_train);
        const int removed_by_theta = merge_similar_rules(
            model, merge_counts, S, config.similarity_threshold);

        phase.num_rules = model.num_rules();
        phase.epochs = schedule[static_cast<std::size_t>(t) - 1];
        TrainResult refined =
            train(X_train, y_train, X_test, y_test, phase, rng, &model);
        model = std::move(refined.model);

        const int epoch_base = static_cast<int>(epochs.size());
        for (EpochLog entry : refined.log) {
            entry.epoch += epoch_base;
            epochs.push_back(entry);
        }

        history.push_back({t, rules_before, removed_by_gamma, removed_by_theta,
                           model.num_rules(),
                           test_rmse_of(model, X_test, y_test)});
    }

    return {std::move(model), std::move(history), std::move(epochs)};
}

PruneResult prune_and_refine(const Matrix& X_train, std::span<const double> y_train,
                             const Matrix& X_test, std::span<const double> y_test,
                             const PruneConfig& config) {
    Rng rng(config.inner.seed);
    return prune_and_refine(X_train, y_train, X_test, y_test, config, rng);
}

} // namespace tsk
