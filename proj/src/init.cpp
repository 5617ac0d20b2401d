#include "tsk/init.hpp"

#include <algorithm>
#include <cmath>

#include "tsk/clustering.hpp"
#include "tsk/error.hpp"

namespace tsk {

namespace {

void check_arguments(const Matrix& X, std::span<const double> y, int num_rules) {
    if (X.rows() != static_cast<int>(y.size())) {
        throw ShapeError("feature matrix has " + std::to_string(X.rows()) +
                         " rows but target vector has " +
                         std::to_string(y.size()) + " entries");
    }
    if (num_rules < 1) {
        throw ParameterError("number of rules must be positive, got " +
                             std::to_string(num_rules));
    }
}

// Weighted mean of values under the given (nonnegative) weights; falls back
// to 0 when all weights vanish.
double weighted_mean(std::span<const double> values, const Matrix& W, int row) {
    double numer = 0.0;
    double denom = 0.0;
    for (std::size_t n = 0; n < values.size(); ++n) {
        const double w = W(row, static_cast<int>(n));
        numer += w * values[n];
        denom += w;
    }
    return denom > 0.0 ? numer / denom : 0.0;
}

// Weighted std of feature column m under row `row` of W, around the weighted
// mean of that column.
double weighted_feature_std(const Matrix& X, const Matrix& W, int row, int m) {
    double wsum = 0.0;
    double mean = 0.0;
    for (int n = 0; n < X.rows(); ++n) {
        wsum += W(row, n);
        mean += W(row, n) * X(n, m);
    }
    if (wsum <= 0.0) return 0.0;
    mean /= wsum;
    double var = 0.0;
    for (int n = 0; n < X.rows(); ++n) {
        const double d = X(n, m) - mean;
        var += W(row, n) * d * d;
    }
    return std::sqrt(var / wsum);
}

} // namespace

TskModel init_gaussian_model(const Matrix& X, std::span<const double> y,
                             int num_rules, Rng& rng) {
    check_arguments(X, y, num_rules);
    const ClusterResult clusters = fuzzy_c_means(X, num_rules, rng);
    const int M = X.cols();

    std::vector<Rule> rules;
    rules.reserve(static_cast<std::size_t>(num_rules));
    for (int r = 0; r < num_rules; ++r) {
        Rule rule;
        rule.antecedents.reserve(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) {
            const double spread = std::max(
                weighted_feature_std(X, clusters.memberships, r, m), kMinSpread);
            rule.antecedents.emplace_back(GaussianMf{clusters.centers(r, m), spread});
        }
        rule.bias = weighted_mean(y, clusters.memberships, r);
        rule.weights.assign(static_cast<std::size_t>(M), 0.0);
        rules.push_back(std::move(rule));
    }
    return TskModel(std::move(rules), M);
}

TskModel init_gaussian_model(const Matrix& X, std::span<const double> y,
                             int num_rules, std::uint64_t seed) {
    Rng rng(seed);
    return init_gaussian_model(X, y, num_rules, rng);
}

TskModel init_trapezoid_model(const Matrix& X, std::span<const double> y,
                              int num_rules, Rng& rng) {
    check_arguments(X, y, num_rules);
    const ClusterResult clusters = k_means(X, num_rules, rng);
    const int M = X.cols();

    std::vector<Rule> rules;
    rules.reserve(static_cast<std::size_t>(num_rules));
    for (int r = 0; r < num_rules; ++r) {
        Rule rule;
        rule.antecedents.reserve(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) {
            const double center = clusters.centers(r, m);
            const double sigma = std::max(
                weighted_feature_std(X, clusters.memberships, r, m), kMinSpread);
            rule.antecedents.emplace_back(TrapezoidMf{center - 10.0 * sigma,
                                                      center - 0.5 * sigma,
                                                      center + 0.5 * sigma,
                                                      center + 10.0 * sigma});
        }
        rule.bias = weighted_mean(y, clusters.memberships, r);
        rule.weights.assign(static_cast<std::size_t>(M), 0.0);
        rules.push_back(std::move(rule));
    }
    return TskModel(std::move(rules), M);
}

TskModel init_trapezoid_model(const Matrix& X, std::span<const double> y,
                              int num_rules, std::uint64_t seed) {
    Rng rng(seed);
    return init_trapezoid_model(X, y, num_rules, rng);
}

TskModel init_model(MfType type, const Matrix& X, std::span<const double> y,
                    int num_rules, Rng& rng) {
    return type == MfType::gaussian
               ? init_gaussian_model(X, y, num_rules, rng)
               : init_trapezoid_model(X, y, num_rules, rng);
}

} // namespace tsk
