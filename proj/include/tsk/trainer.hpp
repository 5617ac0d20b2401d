#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tsk/matrix.hpp"
#include "tsk/model.hpp"
#include "tsk/rng.hpp"

namespace tsk {

struct TrainConfig {
    int num_rules = 32;
    int epochs = 500;
    int batch_size = 64;
    double droprule_keep = 0.5; // P: probability a rule keeps its firing level
    double init_lr = 0.01;      // alpha
    double l2_lambda = 0.05;    // lambda, non-bias consequents only
    std::uint64_t seed = 0;
    MfType mf_type = MfType::gaussian;

    void validate() const;
};

/// Exponential moving averages of the gradient and its square, plus the
/// step counter that drives bias correction and the bound schedule.
struct AdaBoundState {
    int step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

inline constexpr double kAdaBoundBeta1 = 0.9;
inline constexpr double kAdaBoundBeta2 = 0.999;

struct AdaBoundBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Learning-rate clipping interval at step k. Both ends converge to 0.01,
/// so late training behaves like SGD with a fixed rate.
AdaBoundBounds adabound_bounds(int k);

/// One AdaBound update in place. Increments state.step, refreshes the moment
/// estimates from grad, and moves each coordinate by its clipped per-
/// coordinate rate. If effective_rates is given it receives the clipped rate
/// actually applied per coordinate.
void adabound_step(std::span<double> params, std::span<const double> grad,
                   AdaBoundState& state, double init_lr,
                   std::vector<double>* effective_rates = nullptr);

/// One DropRule mask: entry r is 1 with probability keep_prob. Draws exactly
/// num_rules uniforms from the stream.
std::vector<std::uint8_t> droprule_mask(int num_rules, double keep_prob, Rng& rng);

/// Batch loss: half the sum of squared residuals plus (lambda/2) times the
/// squared non-bias consequent weights. When masks is non-null it must hold
/// batch x R entries row-major; masked-out rules fire at 0 for that sample,
/// and samples whose rules are all masked fall back to the uniform
/// firing-level policy.
double loss(const TskModel& model, const Matrix& batch_X,
            std::span<const double> batch_y, double lambda,
            const std::vector<std::uint8_t>* masks = nullptr);

/// Gradient of loss over the batch, flattened in the model's parameter
/// layout. Masks as in loss; dropped rules get zero gradient contribution
/// from the samples that dropped them. The regularization term is added once
/// per call. If batch_loss_out is given it receives the matching loss value,
/// saving a second forward pass.
std::vector<double> gaussian_gradients(const TskModel& model, const Matrix& batch_X,
                                       std::span<const double> batch_y,
                                       const std::vector<std::uint8_t>& masks,
                                       double lambda,
                                       double* batch_loss_out = nullptr);
std::vector<double> trapezoid_gradients(const TskModel& model, const Matrix& batch_X,
                                        std::span<const double> batch_y,
                                        const std::vector<std::uint8_t>& masks,
                                        double lambda,
                                        double* batch_loss_out = nullptr);

/// Restore a < b <= c < d on the four sorted values. Ties at the feet are
/// separated by 1e-6; a fully collapsed quadruple becomes a thin triangle
/// around its midpoint.
std::array<double, 4> ordered_trapezoid(double a, double b, double c, double d);

/// Apply ordered_trapezoid to every MF of a trapezoid-family model.
void enforce_trapezoid_order(TskModel& model);

struct EpochLog {
    int epoch = 0;             // 1-based
    double train_batch_loss = 0.0;
    double test_rmse = 0.0;
};

/// Called after each epoch's parameter update with the epoch number, the
/// updated model, and the per-coordinate learning rates AdaBound applied.
using EpochObserver =
    std::function<void(int, const TskModel&, const std::vector<double>&)>;

struct TrainResult {
    TskModel model;
    std::vector<EpochLog> log;
};

/// Mini-batch gradient descent with regularization, DropRule, and AdaBound.
/// One batch and one optimizer step per epoch. If initial is null the rule
/// base is initialized from the training data (consuming the same stream).
/// Per-epoch test RMSE is computed with all rules active.
TrainResult train(const Matrix& X_train, std::span<const double> y_train,
                  const Matrix& X_test, std::span<const double> y_test,
                  const TrainConfig& config, Rng& rng,
                  const TskModel* initial = nullptr,
                  const EpochObserver& observer = {});

/// Convenience overload seeding a fresh stream from config.seed.
TrainResult train(const Matrix& X_train, std::span<const double> y_train,
                  const Matrix& X_test, std::span<const double> y_test,
                  const TrainConfig& config, const TskModel* initial = nullptr,
                  const EpochObserver& observer = {});

} // namespace tsk
