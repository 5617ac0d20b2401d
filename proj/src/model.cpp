#include "tsk/model.hpp"

#include <algorithm>
#include <utility>

namespace tsk {

TskModel::TskModel(std::vector<Rule> rules, int num_features)
    : rules_(std::move(rules)), num_features_(num_features) {
    if (rules_.empty()) throw ParameterError("TskModel: at least one rule required");
    if (num_features_ < 1) throw ShapeError("TskModel: at least one feature required");
    for (const Rule& rule : rules_) {
        if (static_cast<int>(rule.antecedents.size()) != num_features_ ||
            static_cast<int>(rule.weights.size()) != num_features_)
            throw ShapeError("TskModel: rule arity does not match num_features");
    }
    mf_type_ = mf_type_of(rules_.front().antecedents.front());
    for (const Rule& rule : rules_)
        for (const MembershipFunction& mf : rule.antecedents)
            if (mf_type_of(mf) != mf_type_)
                throw ParameterError("TskModel: mixed membership-function families");
}

int TskModel::parameter_count() const { return num_rules() * rule_stride(); }

std::vector<double> TskModel::parameters() const {
    std::vector<double> theta;
    theta.reserve(parameter_count());
    for (const Rule& rule : rules_) {
        for (const MembershipFunction& mf : rule.antecedents) {
            if (mf_type_ == MfType::gaussian) {
                const auto& g = std::get<GaussianMf>(mf);
                theta.push_back(g.center);
                theta.push_back(g.spread);
            } else {
                const auto& t = std::get<TrapezoidMf>(mf);
                theta.push_back(t.a);
                theta.push_back(t.b);
                theta.push_back(t.c);
                theta.push_back(t.d);
            }
        }
        theta.push_back(rule.bias);
        theta.insert(theta.end(), rule.weights.begin(), rule.weights.end());
    }
    return theta;
}

void TskModel::set_parameters(std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != parameter_count())
        throw ShapeError("TskModel::set_parameters: wrong parameter count");
    std::size_t k = 0;
    for (Rule& rule : rules_) {
        for (MembershipFunction& mf : rule.antecedents) {
            if (mf_type_ == MfType::gaussian) {
                const double center = theta[k++];
                const double spread = theta[k++];
                mf = GaussianMf(center, spread);
            } else {
                const double a = theta[k++];
                const double b = theta[k++];
                const double c = theta[k++];
                const double d = theta[k++];
                mf = TrapezoidMf(a, b, c, d);
            }
        }
        rule.bias = theta[k++];
        for (double& w : rule.weights) w = theta[k++];
    }
}

TskModel TskModel::subset(std::span<const int> keep) const {
    std::vector<Rule> kept;
    kept.reserve(keep.size());
    for (int idx : keep) {
        if (idx < 0 || idx >= num_rules()) throw ParameterError("TskModel::subset: rule index out of range");
        kept.push_back(rules_[idx]);
    }
    return TskModel(std::move(kept), num_features_);
}

void TskModel::replace_rule(int r, Rule rule) {
    if (r < 0 || r >= num_rules()) throw ParameterError("TskModel::replace_rule: index out of range");
    if (static_cast<int>(rule.antecedents.size()) != num_features_ ||
        static_cast<int>(rule.weights.size()) != num_features_)
        throw ShapeError("TskModel::replace_rule: rule arity mismatch");
    for (const MembershipFunction& mf : rule.antecedents)
        if (mf_type_of(mf) != mf_type_) throw ParameterError("TskModel::replace_rule: family mismatch");
    rules_[r] = std::move(rule);
}

void TskModel::remove_rule(int r) {
    if (r < 0 || r >= num_rules()) throw ParameterError("TskModel::remove_rule: index out of range");
    if (num_rules() == 1) throw ParameterError("TskModel::remove_rule: cannot remove the last rule");
    rules_.erase(rules_.begin() + r);
}

double firing_level(const Rule& rule, std::span<const double> x) {
    if (x.size() != rule.antecedents.size())
        throw ShapeError("firing_level: input length does not match rule arity");
    double f = 1.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
        f *= membership(rule.antecedents[m], x[m]);
        if (f == 0.0) return 0.0;
    }
    return std::max(f, 0.0);
}

void firing_levels(const TskModel& model, std::span<const double> x, std::span<double> out) {
    for (int r = 0; r < model.num_rules(); ++r) out[r] = firing_level(model.rule(r), x);
}

std::vector<double> normalized_firing_levels(std::span<const double> firing) {
    const std::size_t n = firing.size();
    std::vector<double> out(n);
    double sum = 0.0;
    for (double f : firing) sum += f;
    if (sum <= kFiringEpsilon) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
        return out;
    }
    for (std::size_t r = 0; r < n; ++r) out[r] = firing[r] / sum;
    return out;
}

std::vector<double> normalized_firing_levels(const TskModel& model, std::span<const double> x) {
    std::vector<double> firing(model.num_rules());
    firing_levels(model, x, firing);
    return normalized_firing_levels(firing);
}

double rule_output(const Rule& rule, std::span<const double> x) {
    if (x.size() != rule.weights.size())
        throw ShapeError("rule_output: input length does not match rule arity");
    double y = rule.bias;
    for (std::size_t m = 0; m < x.size(); ++m) y += rule.weights[m] * x[m];
    return y;
}

double predict(const TskModel& model, std::span<const double> x, std::span<const double> firing) {
    if (static_cast<int>(firing.size()) != model.num_rules())
        throw ShapeError("predict: firing vector length does not match rule count");
    double sum_f = 0.0;
    double sum_fy = 0.0;
    for (int r = 0; r < model.num_rules(); ++r) {
        sum_f += firing[r];
        sum_fy += firing[r] * rule_output(model.rule(r), x);
    }
    if (sum_f <= kFiringEpsilon) {
        double mean = 0.0;
        for (int r = 0; r < model.num_rules(); ++r) mean += rule_output(model.rule(r), x);
        return mean / model.num_rules();
    }
    return sum_fy / sum_f;
}

double predict(const TskModel& model, std::span<const double> x) {
    std::vector<double> firing(model.num_rules());
    firing_levels(model, x, firing);
    return predict(model, x, firing);
}

std::vector<double> predict_batch(const TskModel& model, const Matrix& X) {
    if (X.cols() != model.num_features())
        throw ShapeError("predict_batch: feature count mismatch");
    std::vector<double> out(X.rows());
    std::vector<double> firing(model.num_rules());
    for (int n = 0; n < X.rows(); ++n) {
        firing_levels(model, X.row(n), firing);
        out[n] = predict(model, X.row(n), firing);
    }
    return out;
}

} // namespace tsk
