#pragma once

#include <cmath>
#include <span>

#include "tsk/error.hpp"

namespace tsk {

/// Root mean squared error between predictions and targets.
inline double rmse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw ShapeError("rmse: length mismatch");
    if (predictions.empty()) throw ShapeError("rmse: empty input");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sum_sq += e * e;
    }
    return std::sqrt(sum_sq / static_cast<double>(predictions.size()));
}

} // namespace tsk
