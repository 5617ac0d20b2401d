#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsk/matrix.hpp"
#include "tsk/rng.hpp"

namespace tsk {

/// A regression table: N samples, M features, one real target per sample.
struct Dataset {
    Matrix features;
    std::vector<double> targets;
    std::vector<std::string> feature_names;

    int num_samples() const { return features.rows(); }
    int num_features() const { return features.cols(); }
};

/// Standardization statistics fitted on a training split. Features are
/// scaled to zero mean and unit variance (population convention, divisor N)
/// and the target mean is subtracted.
struct PreprocessingParams {
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    double target_mean = 0.0;
    // Feature columns retained by fit_transform; identity unless constant
    // columns were dropped.
    std::vector<int> kept_columns;
};

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

/// Parse a comma-separated numeric table; the last column is the target.
/// Reports malformed cells with their 1-based data row and column.
Dataset load_csv(const std::string& path, bool has_header);

void save_csv(const Dataset& data, const std::string& path, bool with_header);

/// Standardize the training split and record the statistics. Constant
/// feature columns are an error unless drop_constant_features is set, in
/// which case they are removed (kept_columns records the survivors).
std::pair<Dataset, PreprocessingParams> fit_transform(const Dataset& train,
                                                      bool drop_constant_features = false);

/// Apply training-split statistics to another dataset.
Dataset apply_preprocessing(const PreprocessingParams& params, const Dataset& data);

/// Random partition of [0, n) into train/test index sets, both sorted.
/// Train size is round(train_fraction * n).
std::pair<std::vector<int>, std::vector<int>> split_indices(int n, const SplitSpec& spec);
std::pair<std::vector<int>, std::vector<int>> split_indices(int n, double train_fraction, Rng& rng);

Dataset subset(const Dataset& data, std::span<const int> indices);

} // namespace tsk
