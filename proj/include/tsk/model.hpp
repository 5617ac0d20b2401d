#pragma once

#include <span>
#include <vector>

#include "tsk/matrix.hpp"
#include "tsk/mf.hpp"

namespace tsk {

/// One fuzzy rule: an antecedent membership function per feature plus an
/// affine consequent y_r(x) = bias + sum_m weights[m] * x[m].
struct Rule {
    std::vector<MembershipFunction> antecedents;
    double bias = 0.0;
    std::vector<double> weights;
};

/// An ordered rulebase over a fixed number of features. All membership
/// functions share one shape family. Construction validates shapes, so a
/// live model always satisfies its invariants.
class TskModel {
public:
    TskModel(std::vector<Rule> rules, int num_features);

    int num_rules() const { return static_cast<int>(rules_.size()); }
    int num_features() const { return num_features_; }
    MfType mf_type() const { return mf_type_; }
    const Rule& rule(int r) const { return rules_[r]; }
    const std::vector<Rule>& rules() const { return rules_; }

    /// Flat parameter vector: per rule, membership parameters in feature
    /// order, then the bias, then the feature weights.
    int parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> theta);

    /// Number of parameter slots per rule in the flat layout.
    int rule_stride() const { return num_features_ * mf_param_count(mf_type_) + 1 + num_features_; }

    /// New model keeping the listed rules, in the given order.
    TskModel subset(std::span<const int> keep) const;

    /// Replace one rule in place; the rule must match the model's shape.
    void replace_rule(int r, Rule rule);
    void remove_rule(int r);

private:
    std::vector<Rule> rules_;
    int num_features_ = 0;
    MfType mf_type_ = MfType::gaussian;
};

// Raw firing sums at or below this are degenerate: prediction falls back to
// the unweighted rule mean and normalized levels become uniform. This covers
// trapezoid supports that drifted apart and samples whose rules were all
// dropped during training.
inline constexpr double kFiringEpsilon = 1e-12;

/// Product of the rule's membership grades at x.
double firing_level(const Rule& rule, std::span<const double> x);

/// Firing level of every rule; out must have num_rules entries.
void firing_levels(const TskModel& model, std::span<const double> x, std::span<double> out);

/// Normalize a nonnegative firing vector to sum 1; uniform if the sum is degenerate.
std::vector<double> normalized_firing_levels(std::span<const double> firing);
std::vector<double> normalized_firing_levels(const TskModel& model, std::span<const double> x);

/// Affine consequent value of one rule.
double rule_output(const Rule& rule, std::span<const double> x);

/// Firing-weighted mean of the rule outputs; plain mean when firing is degenerate.
double predict(const TskModel& model, std::span<const double> x);
double predict(const TskModel& model, std::span<const double> x, std::span<const double> firing);

std::vector<double> predict_batch(const TskModel& model, const Matrix& X);

} // namespace tsk
