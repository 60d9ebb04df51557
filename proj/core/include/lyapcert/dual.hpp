#pragma once

#include <cmath>

#include "lyapcert/errors.hpp"

namespace lyapcert {

/// Forward-mode tangent: value plus derivative with respect to one chosen
/// input variable. Arithmetic encodes the product/quotient/chain rules, so
/// evaluating an expression over Dual yields the exact partial derivative.
struct Dual {
    double val = 0.0;
    double der = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double v) : val(v) {}
    constexpr Dual(double v, double d) : val(v), der(d) {}
};

constexpr Dual operator+(Dual a, Dual b) { return {a.val + b.val, a.der + b.der}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.val - b.val, a.der - b.der}; }
constexpr Dual operator-(Dual a) { return {-a.val, -a.der}; }

constexpr Dual operator*(Dual a, Dual b) {
    return {a.val * b.val, a.der * b.val + a.val * b.der};
}

constexpr Dual operator/(Dual a, Dual b) {
    const double v = a.val / b.val;
    return {v, (a.der - v * b.der) / b.val};
}

inline Dual sin(Dual a) { return {std::sin(a.val), std::cos(a.val) * a.der}; }
inline Dual cos(Dual a) { return {std::cos(a.val), -std::sin(a.val) * a.der}; }

inline Dual tan(Dual a) {
    const double t = std::tan(a.val);
    return {t, (1.0 + t * t) * a.der};
}

inline Dual tanh(Dual a) {
    const double t = std::tanh(a.val);
    return {t, (1.0 - t * t) * a.der};
}

/// sech(x) = 1/cosh(x); decays to 0 for large |x| instead of overflowing.
inline double sech(double x) { return 1.0 / std::cosh(x); }

inline Dual sech(Dual a) {
    const double s = sech(a.val);
    return {s, -s * std::tanh(a.val) * a.der};
}

inline Dual exp(Dual a) {
    const double e = std::exp(a.val);
    return {e, e * a.der};
}

inline Dual ln(Dual a) { return {std::log(a.val), a.der / a.val}; }
inline double ln(double x) { return std::log(x); }

inline Dual sqrt(Dual a) {
    const double s = std::sqrt(a.val);
    return {s, a.der / (2.0 * s)};
}

/// abs has no derivative at 0; that is a hard error, not a subgradient pick.
inline Dual abs(Dual a) {
    if (a.val == 0.0) {
        throw NonDifferentiableError("abs is not differentiable at 0");
    }
    return {std::fabs(a.val), (a.val > 0.0 ? a.der : -a.der)};
}

[[nodiscard]] inline bool is_integer_value(double x) {
    return std::isfinite(x) && x == std::trunc(x) && std::fabs(x) < 9.007199254740992e15;
}

/// Real-field power. Negative base with a non-integer exponent is a domain
/// error rather than a NaN or a complex branch.
inline double pow_checked(double base, double expo) {
    if (base < 0.0 && !is_integer_value(expo)) {
        throw EvalError("negative base with non-integer exponent");
    }
    return std::pow(base, expo);
}

inline Dual pow(Dual base, Dual expo) {
    if (expo.der == 0.0) {
        const double v = pow_checked(base.val, expo.val);
        double d = 0.0;
        if (base.der != 0.0 && expo.val != 0.0) {
            d = expo.val * std::pow(base.val, expo.val - 1.0) * base.der;
        }
        return {v, d};
    }
    // variable exponent: only defined over a positive base
    if (base.val <= 0.0) {
        throw EvalError("variable exponent requires a positive base");
    }
    const double v = std::pow(base.val, expo.val);
    return {v, v * (expo.der * std::log(base.val) + expo.val * base.der / base.val)};
}

} // namespace lyapcert
