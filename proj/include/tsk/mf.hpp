#pragma once

#include <cmath>
#include <variant>

#include "tsk/error.hpp"

namespace tsk {

enum class MfType { gaussian, trapezoid };

/// Bell-shaped membership function exp(-(x - center)^2 / (2 spread^2)).
struct GaussianMf {
    double center = 0.0;
    double spread = 1.0;

    GaussianMf() = default;
    GaussianMf(double center_, double spread_) : center(center_), spread(spread_) {
        if (!(spread > 0.0)) throw ParameterError("GaussianMf: spread must be positive");
    }
};

/// Piecewise-linear membership function with feet a, d and shoulders b, c.
/// Requires a < b <= c < d; b == c degenerates to a triangle.
struct TrapezoidMf {
    double a = -2.0;
    double b = -1.0;
    double c = 1.0;
    double d = 2.0;

    TrapezoidMf() = default;
    TrapezoidMf(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
        if (!(a < b && b <= c && c < d))
            throw ParameterError("TrapezoidMf: parameters must satisfy a < b <= c < d");
    }
};

using MembershipFunction = std::variant<GaussianMf, TrapezoidMf>;

inline double membership(const GaussianMf& mf, double x) {
    const double z = (x - mf.center) / mf.spread;
    return std::exp(-0.5 * z * z);
}

inline double membership(const TrapezoidMf& mf, double x) {
    if (x >= mf.b && x <= mf.c) return 1.0;
    if (x > mf.a && x < mf.b) return (x - mf.a) / (mf.b - mf.a);
    if (x > mf.c && x < mf.d) return (mf.d - x) / (mf.d - mf.c);
    return 0.0;
}

inline double membership(const MembershipFunction& mf, double x) {
    return std::visit([x](const auto& m) { return membership(m, x); }, mf);
}

inline MfType mf_type_of(const MembershipFunction& mf) {
    return std::holds_alternative<GaussianMf>(mf) ? MfType::gaussian : MfType::trapezoid;
}

inline const char* mf_type_name(MfType type) {
    return type == MfType::gaussian ? "gaussian" : "trapezoid";
}

/// Number of free parameters of one membership function of this family.
inline int mf_param_count(MfType type) {
    return type == MfType::gaussian ? 2 : 4;
}

} // namespace tsk
