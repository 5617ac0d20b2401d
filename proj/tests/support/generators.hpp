#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsk/matrix.hpp"
#include "tsk/model.hpp"
#include "tsk/rng.hpp"

namespace tsk::testing {

/// Margin kept between finite-difference probe points and trapezoid kinks,
/// far wider than the probe step so no perturbation flips a piecewise branch.
inline constexpr double kKinkMargin = 0.01;

inline TskModel random_gaussian_model(int num_rules, int num_features, Rng& rng) {
    std::vector<Rule> rules;
    rules.reserve(static_cast<std::size_t>(num_rules));
    for (int r = 0; r < num_rules; ++r) {
        Rule rule;
        for (int m = 0; m < num_features; ++m) {
            rule.antecedents.emplace_back(
                GaussianMf{rng.uniform(-1.5, 1.5), rng.uniform(0.3, 1.2)});
        }
        rule.bias = rng.uniform(-1.0, 1.0);
        for (int m = 0; m < num_features; ++m)
            rule.weights.push_back(rng.uniform(-1.0, 1.0));
        rules.push_back(std::move(rule));
    }
    return TskModel(std::move(rules), num_features);
}

/// Trapezoids with every consecutive parameter pair separated by well over
/// 2 * kKinkMargin, so probe placement always has room.
inline TskModel random_trapezoid_model(int num_rules, int num_features, Rng& rng) {
    std::vector<Rule> rules;
    rules.reserve(static_cast<std::size_t>(num_rules));
    for (int r = 0; r < num_rules; ++r) {
        Rule rule;
        for (int m = 0; m < num_features; ++m) {
            const double center = rng.uniform(-1.0, 1.0);
            const double plateau = rng.uniform(0.15, 0.45);
            const double b = center - plateau;
            const double c = center + plateau;
            const double a = b - rng.uniform(0.4, 1.2);
            const double d = c + rng.uniform(0.4, 1.2);
            rule.antecedents.emplace_back(TrapezoidMf{a, b, c, d});
        }
        rule.bias = rng.uniform(-1.0, 1.0);
        for (int m = 0; m < num_features; ++m)
            rule.weights.push_back(rng.uniform(-1.0, 1.0));
        rules.push_back(std::move(rule));
    }
    return TskModel(std::move(rules), num_features);
}

inline Matrix random_batch(int samples, int num_features, Rng& rng,
                           double lo = -2.0, double hi = 2.0) {
    Matrix X(samples, num_features);
    for (int n = 0; n < samples; ++n)
        for (int m = 0; m < num_features; ++m) X(n, m) = rng.uniform(lo, hi);
    return X;
}

inline std::vector<double> random_targets(int samples, Rng& rng) {
    std::vector<double> y(static_cast<std::size_t>(samples));
    for (double& v : y) v = rng.uniform(-2.0, 2.0);
    return y;
}

namespace detail {

inline std::vector<double> feature_kinks(const TskModel& model, int m) {
    std::vector<double> kinks;
    for (int r = 0; r < model.num_rules(); ++r) {
        const auto& t = std::get<TrapezoidMf>(
            model.rule(r).antecedents[static_cast<std::size_t>(m)]);
        kinks.insert(kinks.end(), {t.a, t.b, t.c, t.d});
    }
    return kinks;
}

inline bool clear_of_kinks(double x, const std::vector<double>& kinks) {
    return std::all_of(kinks.begin(), kinks.end(), [x](double k) {
        return std::abs(x - k) >= kKinkMargin;
    });
}

} // namespace detail

/// Probe points for trapezoid gradient checks: each coordinate aims for a
/// deliberately chosen region (left slope, plateau, right slope, or outside
/// the support) of one rule's MF while staying kKinkMargin away from every
/// rule's kinks in that feature.
inline Matrix trapezoid_probe_batch(const TskModel& model, int samples, Rng& rng) {
    const int M = model.num_features();
    Matrix X(samples, M);
    for (int m = 0; m < M; ++m) {
        const std::vector<double> kinks = detail::feature_kinks(model, m);
        for (int n = 0; n < samples; ++n) {
            double x = 0.0;
            bool placed = false;
            for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
                const int r = static_cast<int>(
                    rng.below(static_cast<std::uint64_t>(model.num_rules())));
                const auto& t = std::get<TrapezoidMf>(
                    model.rule(r).antecedents[static_cast<std::size_t>(m)]);
                const int region = static_cast<int>(rng.below(8));
                double lo = 0.0;
                double hi = 0.0;
                switch (region) {
                case 0:
                case 1:
                case 2: // left slope
                    lo = t.a;
                    hi = t.b;
                    break;
                case 3:
                case 4:
                case 5: // right slope
                    lo = t.c;
                    hi = t.d;
                    break;
                case 6: // plateau
                    lo = t.b;
                    hi = t.c;
                    break;
                default: // outside the support
                    lo = t.d;
                    hi = t.d + 1.0;
                    break;
                }
                if (hi - lo < 2.5 * kKinkMargin) continue;
                x = rng.uniform(lo + kKinkMargin, hi - kKinkMargin);
                placed = detail::clear_of_kinks(x, kinks);
            }
            if (!placed) {
                // Scan outward from the support until a clear point appears.
                const auto [lo_it, hi_it] =
                    std::minmax_element(kinks.begin(), kinks.end());
                x = *hi_it + 2.0 * kKinkMargin;
                while (!detail::clear_of_kinks(x, kinks)) x += kKinkMargin;
                (void)lo_it;
            }
            X(n, m) = x;
        }
    }
    return X;
}

} // namespace tsk::testing
