#pragma once

#include <span>
#include <vector>

#include "tsk/matrix.hpp"
#include "tsk/model.hpp"
#include "tsk/rng.hpp"
#include "tsk/trainer.hpp"

namespace tsk {

struct PruneConfig {
    int initial_rules = 32;            // R0
    int total_epochs = 500;            // K0, split across phases
    double firing_threshold = 0.5;     // gamma
    double similarity_threshold = 0.5; // theta
    int prune_iterations = 3;          // T
    TrainConfig inner; // batch size, P, alpha, lambda, mf_type; rules/epochs
                       // are overridden per phase

    void validate() const;
};

/// One row of the pruning history. Iteration 1 is the initial training
/// phase (nothing removed); iterations 2..T interleave pruning with
/// refinement.
struct PruneRecord {
    int iteration = 0;
    int rules_before = 0;
    int removed_by_gamma = 0;
    int removed_by_theta = 0;
    int rules_after = 0;
    double test_rmse = 0.0;
};

/// Epoch budget per phase: 60% up front, the rest split evenly across the
/// T-1 refinements.
std::vector<int> epoch_schedule(int total_epochs, int iterations);

/// Per-rule sum of normalized firing levels over the whole set (all rules
/// active).
std::vector<double> firing_strengths(const TskModel& model, const Matrix& X);

/// Indices (ascending) of rules whose strength reaches gamma times the
/// median strength. The strongest rule always survives.
std::vector<int> low_firing_filter(std::span<const double> strengths, double gamma);

/// Fuzzy Jaccard: sum of element-wise minima over sum of element-wise
/// maxima. Two all-zero vectors count as dissimilar (0).
double jaccard_similarity(std::span<const double> a, std::span<const double> b);

/// Symmetric R x R matrix of pairwise rule similarities on X, zero diagonal.
Matrix build_similarity_matrix(const TskModel& model, const Matrix& X);

/// Fold rule j into rule i: every parameter of rule i becomes the
/// merge-count-weighted average, rule j is dropped, and counts[i] is
/// incremented by one.
void merge_rules(TskModel& model, std::vector<int>& merge_counts, int i, int j);

/// Repeatedly merge the most similar pair while the maintained similarity
/// matrix exceeds the threshold. S is updated by row/column averaging (not
/// rebuilt) and shrinks alongside the model. Returns the number of merges.
int merge_similar_rules(TskModel& model, std::vector<int>& merge_counts,
                        Matrix& S, double threshold);

struct PruneResult {
    TskModel model;
    std::vector<PruneRecord> history;
    // Per-epoch logs from every training phase, renumbered so epochs run
    // 1..K0 across the whole pipeline.
    std::vector<EpochLog> epochs;
};

/// Full pruning pipeline: train R0 rules, then alternate
/// {strength filter -> similarity merging -> refinement} for the remaining
/// iterations. Each refinement restarts the optimizer state.
PruneResult prune_and_refine(const Matrix& X_train, std::span<const double> y_train,
                             const Matrix& X_test, std::span<const double> y_test,
                             const PruneConfig& config, Rng& rng);

/// Convenience overload seeding a fresh stream from config.inner.seed.
PruneResult prune_and_refine(const Matrix& X_train, std::span<const double> y_train,
                             const Matrix& X_test, std::span<const double> y_test,
                             const PruneConfig& config);

} // namespace tsk
