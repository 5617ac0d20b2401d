#pragma once

#include <cstdint>

#include "tsk/matrix.hpp"
#include "tsk/model.hpp"
#include "tsk/rng.hpp"

namespace tsk {

/// Spreads are clamped from below so no antecedent starts degenerate.
inline constexpr double kMinSpread = 1e-3;

/// Gaussian rule base from fuzzy c-means: rule r takes the cluster-r center
/// as MF centers, the membership-weighted standard deviation per feature as
/// spreads, and the membership-weighted mean target as its bias. Consequent
/// weights start at zero.
TskModel init_gaussian_model(const Matrix& X, std::span<const double> y,
                             int num_rules, Rng& rng);
TskModel init_gaussian_model(const Matrix& X, std::span<const double> y,
                             int num_rules, std::uint64_t seed);

/// Trapezoidal rule base from k-means: each MF gets a long-legged trapezoid
/// around the cluster center (shoulders at +-0.5 sigma, feet at +-10 sigma,
/// sigma the within-cluster std of that feature). Bias starts at the
/// within-cluster mean target, weights at zero.
TskModel init_trapezoid_model(const Matrix& X, std::span<const double> y,
                              int num_rules, Rng& rng);
TskModel init_trapezoid_model(const Matrix& X, std::span<const double> y,
                              int num_rules, std::uint64_t seed);

/// Dispatch on MF family.
TskModel init_model(MfType type, const Matrix& X, std::span<const double> y,
                    int num_rules, Rng& rng);

} // namespace tsk
