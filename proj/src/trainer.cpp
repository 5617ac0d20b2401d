#include "tsk/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "tsk/error.hpp"
#include "tsk/init.hpp"
#include "tsk/metrics.hpp"

namespace tsk {

namespace {

// Everything the loss and both gradient kernels need from one sample's
// forward pass. firing already has the DropRule mask applied.
struct SampleForward {
    std::vector<double> firing;
    std::vector<double> normalized;
    std::vector<double> rule_outputs;
    double firing_sum = 0.0;
    double prediction = 0.0;
    double error = 0.0; // prediction - target
    bool degenerate = false;
};

void forward_sample(const TskModel& model, std::span<const double> x,
                    double target, const std::uint8_t* mask, SampleForward& fw) {
    const int R = model.num_rules();
    fw.firing.resize(static_cast<std::size_t>(R));
    fw.normalized.resize(static_cast<std::size_t>(R));
    fw.rule_outputs.resize(static_cast<std::size_t>(R));

    fw.firing_sum = 0.0;
    for (int r = 0; r < R; ++r) {
        const double f = (mask != nullptr && mask[r] == 0)
                             ? 0.0
                             : firing_level(model.rule(r), x);
        fw.firing[static_cast<std::size_t>(r)] = f;
        fw.firing_sum += f;
        fw.rule_outputs[static_cast<std::size_t>(r)] = rule_output(model.rule(r), x);
    }

    fw.degenerate = fw.firing_sum <= kFiringEpsilon;
    fw.prediction = 0.0;
    for (int r = 0; r < R; ++r) {
        const double fbar = fw.degenerate
                                ? 1.0 / R
                                : fw.firing[static_cast<std::size_t>(r)] / fw.firing_sum;
        fw.normalized[static_cast<std::size_t>(r)] = fbar;
        fw.prediction += fbar * fw.rule_outputs[static_cast<std::size_t>(r)];
    }
    fw.error = fw.prediction - target;
}

double weight_penalty(const TskModel& model, double lambda) {
    if (lambda == 0.0) return 0.0;
    double total = 0.0;
    for (int r = 0; r < model.num_rules(); ++r) {
        for (const double w : model.rule(r).weights) total += w * w;
    }
    return 0.5 * lambda * total;
}

void check_batch(const TskModel& model, const Matrix& X,
                 std::span<const double> y,
                 const std::vector<std::uint8_t>* masks) {
    if (X.rows() == 0) throw ShapeError("batch is empty");
    if (X.rows() != static_cast<int>(y.size())) {
        throw ShapeError("batch has " + std::to_string(X.rows()) +
                         " samples but " + std::to_string(y.size()) + " targets");
    }
    if (X.cols() != model.num_features()) {
        throw ShapeError("batch has " + std::to_string(X.cols()) +
                         " features but model expects " +
                         std::to_string(model.num_features()));
    }
    if (masks != nullptr &&
        static_cast<int>(masks->size()) != X.rows() * model.num_rules()) {
        throw ShapeError("mask buffer has " + std::to_string(masks->size()) +
                         " entries, expected batch*rules = " +
                         std::to_string(X.rows() * model.num_rules()));
    }
}

// Accumulates the consequent part shared by both MF families and returns the
// per-sample common factor e * (y_r - y) / sum_f used by the antecedent
// gradients, or 0 when the sample is degenerate or the rule was dropped.
double consequent_terms(const SampleForward& fw, std::span<const double> x,
                        int r, double* grads, int consequent_offset) {
    const double fbar = fw.normalized[static_cast<std::size_t>(r)];
    grads[consequent_offset] += fw.error * fbar;
    for (std::size_t m = 0; m < x.size(); ++m) {
        grads[consequent_offset + 1 + static_cast<int>(m)] +=
            fw.error * fbar * x[m];
    }
    if (fw.degenerate) return 0.0;
    return fw.error *
           (fw.rule_outputs[static_cast<std::size_t>(r)] - fw.prediction) /
           fw.firing_sum;
}

void add_regularization(const TskModel& model, double lambda,
                        std::vector<double>& grads) {
    if (lambda == 0.0) return;
    const int stride = model.rule_stride();
    const int M = model.num_features();
    const int weights_at = stride - M;
    for (int r = 0; r < model.num_rules(); ++r) {
        const Rule& rule = model.rule(r);
        for (int m = 0; m < M; ++m) {
            grads[static_cast<std::size_t>(r * stride + weights_at + m)] +=
                lambda * rule.weights[static_cast<std::size_t>(m)];
        }
    }
}

} // namespace

void TrainConfig::validate() const {
    if (num_rules < 1)
        throw ConfigError("num_rules must be positive, got " + std::to_string(num_rules));
    if (epochs < 0)
        throw ConfigError("epochs must be nonnegative, got " + std::to_string(epochs));
    if (batch_size < 1)
        throw ConfigError("batch_size must be positive, got " + std::to_string(batch_size));
    if (!(droprule_keep > 0.0) || droprule_keep > 1.0)
        throw ConfigError("droprule_keep must lie in (0, 1], got " +
                          std::to_string(droprule_keep));
    if (!(init_lr > 0.0))
        throw ConfigError("init_lr must be positive, got " + std::to_string(init_lr));
    if (l2_lambda < 0.0)
        throw ConfigError("l2_lambda must be nonnegative, got " +
                          std::to_string(l2_lambda));
}

AdaBoundBounds adabound_bounds(int k) {
    const double decay = (1.0 - kAdaBoundBeta2) * k;
    return {0.01 - 0.01 / (decay + 1.0), 0.01 + 0.01 / decay};
}

void adabound_step(std::span<double> params, std::span<const double> grad,
                   AdaBoundState& state, double init_lr,
                   std::vector<double>* effective_rates) {
    if (params.size() != grad.size()) {
        throw ShapeError("parameter and gradient sizes differ: " +
                         std::to_string(params.size()) + " vs " +
                         std::to_string(grad.size()));
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    } else if (state.m.size() != params.size()) {
        throw ShapeError("optimizer state sized for " +
                         std::to_string(state.m.size()) + " parameters, got " +
                         std::to_string(params.size()));
    }

    ++state.step;
    const auto [lower, upper] = adabound_bounds(state.step);
    const double m_correction = 1.0 - std::pow(kAdaBoundBeta1, state.step);
    const double v_correction = 1.0 - std::pow(kAdaBoundBeta2, state.step);

    if (effective_rates != nullptr) effective_rates->resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = kAdaBoundBeta1 * state.m[i] + (1.0 - kAdaBoundBeta1) * grad[i];
        state.v[i] = kAdaBoundBeta2 * state.v[i] + (1.0 - kAdaBoundBeta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / m_correction;
        const double v_hat = state.v[i] / v_correction;
        const double rate =
            std::clamp(init_lr / (std::sqrt(v_hat) + 1e-8), lower, upper);
        if (effective_rates != nullptr) (*effective_rates)[i] = rate;
        params[i] -= rate * m_hat;
    }
}

std::vector<std::uint8_t> droprule_mask(int num_rules, double keep_prob, Rng& rng) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(num_rules));
    for (auto& kept : mask) kept = rng.uniform() <= keep_prob ? 1 : 0;
    return mask;
}

double loss(const TskModel& model, const Matrix& batch_X,
            std::span<const double> batch_y, double lambda,
            const std::vector<std::uint8_t>* masks) {
    check_batch(model, batch_X, batch_y, masks);
    const int R = model.num_rules();
    SampleForward fw;
    double total = 0.0;
    for (int n = 0; n < batch_X.rows(); ++n) {
        const std::uint8_t* mask =
            masks != nullptr ? masks->data() + static_cast<std::size_t>(n) * R : nullptr;
        forward_sample(model, batch_X.row(n), batch_y[static_cast<std::size_t>(n)],
                       mask, fw);
        total += 0.5 * fw.error * fw.error;
    }
    return total + weight_penalty(model, lambda);
}

std::vector<double> gaussian_gradients(const TskModel& model, const Matrix& batch_X,
                                       std::span<const double> batch_y,
                                       const std::vector<std::uint8_t>& masks,
                                       double lambda, double* batch_loss_out) {
    check_batch(model, batch_X, batch_y, &masks);
    if (model.mf_type() != MfType::gaussian)
        throw ParameterError("gaussian_gradients called on a non-Gaussian model");

    const int R = model.num_rules();
    const int M = model.num_features();
    const int stride = model.rule_stride();
    const int bias_at = 2 * M; // per-rule offset just past the MF parameters

    std::vector<double> grads(static_cast<std::size_t>(model.parameter_count()), 0.0);
    SampleForward fw;
    double total_loss = 0.0;

    for (int n = 0; n < batch_X.rows(); ++n) {
        const auto x = batch_X.row(n);
        const std::uint8_t* mask = masks.data() + static_cast<std::size_t>(n) * R;
        forward_sample(model, x, batch_y[static_cast<std::size_t>(n)], mask, fw);
        total_loss += 0.5 * fw.error * fw.error;

        for (int r = 0; r < R; ++r) {
            double* rule_grads = grads.data() + static_cast<std::size_t>(r) * stride;
            const double common = consequent_terms(fw, x, r, rule_grads, bias_at);
            if (common == 0.0 || mask[r] == 0) continue;

            const double f = fw.firing[static_cast<std::size_t>(r)];
            const Rule& rule = model.rule(r);
            for (int m = 0; m < M; ++m) {
                const auto& g = std::get<GaussianMf>(
                    rule.antecedents[static_cast<std::size_t>(m)]);
                const double diff = x[m] - g.center;
                const double scaled = common * f * diff / (g.spread * g.spread);
                rule_grads[2 * m] += scaled;
                rule_grads[2 * m + 1] += scaled * diff / g.spread;
            }
        }
    }

    add_regularization(model, lambda, grads);
    if (batch_loss_out != nullptr)
        *batch_loss_out = total_loss + weight_penalty(model, lambda);
    return grads;
}

std::vector<double> trapezoid_gradients(const TskModel& model, const Matrix& batch_X,
                                        std::span<const double> batch_y,
                                        const std::vector<std::uint8_t>& masks,
                                        double lambda, double* batch_loss_out) {
    check_batch(model, batch_X, batch_y, &masks);
    if (model.mf_type() != MfType::trapezoid)
        throw ParameterError("trapezoid_gradients called on a non-trapezoid model");

    const int R = model.num_rules();
    const int M = model.num_features();
    const int stride = model.rule_stride();
    const int bias_at = 4 * M;

    std::vector<double> grads(static_cast<std::size_t>(model.parameter_count()), 0.0);
    SampleForward fw;
    std::vector<double> mu(static_cast<std::size_t>(M));
    // partial[m] = product of memberships over every feature except m,
    // assembled from prefix and suffix products so no division by a tiny
    // membership is ever needed.
    std::vector<double> prefix(static_cast<std::size_t>(M) + 1);
    std::vector<double> suffix(static_cast<std::size_t>(M) + 1);
    double total_loss = 0.0;

    for (int n = 0; n < batch_X.rows(); ++n) {
        const auto x = batch_X.row(n);
        const std::uint8_t* mask = masks.data() + static_cast<std::size_t>(n) * R;
        forward_sample(model, x, batch_y[static_cast<std::size_t>(n)], mask, fw);
        total_loss += 0.5 * fw.error * fw.error;

        for (int r = 0; r < R; ++r) {
            double* rule_grads = grads.data() + static_cast<std::size_t>(r) * stride;
            const double common = consequent_terms(fw, x, r, rule_grads, bias_at);
            if (common == 0.0 || mask[r] == 0) continue;

            const Rule& rule = model.rule(r);
            prefix[0] = 1.0;
            suffix[static_cast<std::size_t>(M)] = 1.0;
            for (int m = 0; m < M; ++m) {
                mu[static_cast<std::size_t>(m)] =
                    membership(rule.antecedents[static_cast<std::size_t>(m)], x[m]);
                prefix[static_cast<std::size_t>(m) + 1] =
                    prefix[static_cast<std::size_t>(m)] * mu[static_cast<std::size_t>(m)];
            }
            for (int m = M - 1; m >= 0; --m) {
                suffix[static_cast<std::size_t>(m)] =
                    suffix[static_cast<std::size_t>(m) + 1] * mu[static_cast<std::size_t>(m)];
            }

            for (int m = 0; m < M; ++m) {
                const auto& t = std::get<TrapezoidMf>(
                    rule.antecedents[static_cast<std::size_t>(m)]);
                const double xm = x[m];
                const double mu_m = mu[static_cast<std::size_t>(m)];
                const double partial = prefix[static_cast<std::size_t>(m)] *
                                       suffix[static_cast<std::size_t>(m) + 1];
                double* shape = rule_grads + 4 * m;

                if (xm > t.a && xm < t.b) {
                    // Left slope: mu = (x-a)/(b-a).
                    const double width = t.b - t.a;
                    if (mu_m > kFiringEpsilon) {
                        shape[0] += common * partial * (xm - t.b) / (width * width);
                    }
                    shape[1] += common * partial * (t.a - xm) / (width * width);
                } else if (xm > t.c && xm < t.d) {
                    // Right slope: mu = (d-x)/(d-c).
                    const double width = t.d - t.c;
                    shape[2] += common * partial * (t.d - xm) / (width * width);
                    if (mu_m > kFiringEpsilon) {
                        shape[3] += common * partial * (xm - t.c) / (width * width);
                    }
                }
                // Plateau and outside-support samples move no shape parameter.
            }
        }
    }

    add_regularization(model, lambda, grads);
    if (batch_loss_out != nullptr)
        *batch_loss_out = total_loss + weight_penalty(model, lambda);
    return grads;
}

std::array<double, 4> ordered_trapezoid(double a, double b, double c, double d) {
    constexpr double sep = 1e-6;
    std::array<double, 4> v{a, b, c, d};
    std::sort(v.begin(), v.end());

    // A quadruple squeezed into less than 3*sep cannot host two distinct
    // slopes; rebuild a thin triangle around its midpoint.
    if (v[3] - v[0] < 3.0 * sep) {
        const double mid = 0.5 * (v[0] + v[3]);
        return {mid - 2.0 * sep, mid, mid, mid + 2.0 * sep};
    }
    if (v[0] == v[1]) v[1] = v[0] + sep;
    if (v[2] == v[3]) v[2] = v[3] - sep;
    if (v[1] > v[2]) {
        // Separating the ties crossed the shoulders; collapse the plateau.
        const double mid = 0.5 * (v[1] + v[2]);
        v[1] = mid;
        v[2] = mid;
    }
    return v;
}

void enforce_trapezoid_order(TskModel& model) {
    if (model.mf_type() != MfType::trapezoid)
        throw ParameterError("enforce_trapezoid_order called on a non-trapezoid model");
    std::vector<double> params = model.parameters();
    const int stride = model.rule_stride();
    for (int r = 0; r < model.num_rules(); ++r) {
        for (int m = 0; m < model.num_features(); ++m) {
            double* q = params.data() + static_cast<std::size_t>(r) * stride + 4 * m;
            const auto fixed = ordered_trapezoid(q[0], q[1], q[2], q[3]);
            std::copy(fixed.begin(), fixed.end(), q);
        }
    }
    model.set_parameters(params);
}

namespace {

void clamp_gaussian_spreads(std::vector<double>& params, int num_rules,
                            int num_features, int stride) {
    for (int r = 0; r < num_rules; ++r) {
        for (int m = 0; m < num_features; ++m) {
            double& spread =
                params[static_cast<std::size_t>(r) * stride + 2 * m + 1];
            spread = std::max(spread, kMinSpread);
        }
    }
}

void repair_trapezoid_parameters(std::vector<double>& params, int num_rules,
                                 int num_features, int stride) {
    for (int r = 0; r < num_rules; ++r) {
        for (int m = 0; m < num_features; ++m) {
            double* q = params.data() + static_cast<std::size_t>(r) * stride + 4 * m;
            const auto fixed = ordered_trapezoid(q[0], q[1], q[2], q[3]);
            std::copy(fixed.begin(), fixed.end(), q);
        }
    }
}

} // namespace

TrainResult train(const Matrix& X_train, std::span<const double> y_train,
                  const Matrix& X_test, std::span<const double> y_test,
                  const TrainConfig& config, Rng& rng, const TskModel* initial,
                  const EpochObserver& observer) {
    config.validate();
    if (X_train.rows() == 0) throw DataError("training set is empty");
    if (X_train.rows() != static_cast<int>(y_train.size())) {
        throw ShapeError("training set has " + std::to_string(X_train.rows()) +
                         " samples but " + std::to_string(y_train.size()) +
                         " targets");
    }

    TskModel model = initial != nullptr
                         ? *initial
                         : init_model(config.mf_type, X_train, y_train,
                                      config.num_rules, rng);
    if (model.num_features() != X_train.cols()) {
        throw ShapeError("initial model expects " +
                         std::to_string(model.num_features()) +
                         " features but training data has " +
                         std::to_string(X_train.cols()));
    }

    const int N = X_train.rows();
    const int R = model.num_rules();
    const bool gaussian = model.mf_type() == MfType::gaussian;

    AdaBoundState opt;
    std::vector<EpochLog> log;
    log.reserve(static_cast<std::size_t>(config.epochs));
    std::vector<double> effective_rates;
    std::vector<std::uint8_t> masks(
        static_cast<std::size_t>(config.batch_size) * R);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const std::vector<int> picks =
            config.batch_size <= N
                ? rng.sample_without_replacement(N, config.batch_size)
                : rng.sample_with_replacement(N, config.batch_size);
        const Matrix batch_X = X_train.select_rows(picks);
        std::vector<double> batch_y(picks.size());
        for (std::size_t i = 0; i < picks.size(); ++i)
            batch_y[i] = y_train[static_cast<std::size_t>(picks[i])];

        // One mask row per sample, drawn in sample order.
        for (int n = 0; n < config.batch_size; ++n) {
            for (int r = 0; r < R; ++r) {
                masks[static_cast<std::size_t>(n) * R + r] =
                    rng.uniform() <= config.droprule_keep ? 1 : 0;
            }
        }

        double batch_loss = 0.0;
        const std::vector<double> grads =
            gaussian ? gaussian_gradients(model, batch_X, batch_y, masks,
                                          config.l2_lambda, &batch_loss)
                     : trapezoid_gradients(model, batch_X, batch_y, masks,
                                           config.l2_lambda, &batch_loss);

        std::vector<double> params = model.parameters();
        adabound_step(params, grads, opt, config.init_lr, &effective_rates);
        if (gaussian) {
            clamp_gaussian_spreads(params, R, model.num_features(),
                                   model.rule_stride());
        } else {
            repair_trapezoid_parameters(params, R, model.num_features(),
                                        model.rule_stride());
        }
        model.set_parameters(params);

        const std::vector<double> test_pred = predict_batch(model, X_test);
        const double test_rmse =
            y_test.empty() ? 0.0 : rmse(test_pred, y_test);
        log.push_back({epoch, batch_loss, test_rmse});
        if (observer) observer(epoch, model, effective_rates);
    }

    return {std::move(model), std::move(log)};
}

TrainResult train(const Matrix& X_train, std::span<const double> y_train,
                  const Matrix& X_test, std::span<const double> y_test,
                  const TrainConfig& config, const TskModel* initial,
                  const EpochObserver& observer) {
    Rng rng(config.seed);
    return train(X_train, y_train, X_test, y_test, config, rng, initial, observer);
}

} // namespace tsk
