#pragma once

// Test-only oracles, deliberately independent of the library code paths they
// check: plain central differences, a straight-line fixed-step RK4, and a
// random expression generator for property tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lyapcert/expr.hpp"
#include "lyapcert/system.hpp"

namespace oracles {

inline double central_difference(const lyapcert::Expression& e, std::vector<double> point,
                                 int var, double step = 1e-6) {
    const double x = point[var - 1];
    point[var - 1] = x + step;
    const double fp = e.eval(point);
    point[var - 1] = x - step;
    const double fm = e.eval(point);
    return (fp - fm) / (2.0 * step);
}

/// Fixed-step RK4 written from scratch; returns the terminal state.
inline std::vector<double> reference_rk4(const lyapcert::SystemDef& sys,
                                         std::vector<double> x, double t_end, double dt) {
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
        const double h = std::min(dt, t_end - t);
        sys.eval_into(x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        sys.eval_into(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        sys.eval_into(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        sys.eval_into(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    return x;
}

inline double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Uniform point in the ball of the given radius.
inline std::vector<double> random_ball_point(std::mt19937_64& rng, int dim, double radius) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(dim);
    double norm = 0.0;
    for (int i = 0; i < dim; ++i) {
        x[i] = normal(rng);
        norm += x[i] * x[i];
    }
    norm = std::sqrt(norm);
    const double r = radius * std::pow(unit(rng), 1.0 / dim);
    for (int i = 0; i < dim; ++i) x[i] = norm > 0.0 ? x[i] * r / norm : 0.0;
    return x;
}

/// Random expression source text exercising the full grammar. Not guaranteed
/// evaluable everywhere; use for parse/print round-trip tests.
inline std::string random_expression(std::mt19937_64& rng, int depth, int n_vars) {
    std::uniform_int_distribution<int> pick(0, 99);
    std::uniform_int_distribution<int> var(1, n_vars);
    std::uniform_real_distribution<double> constant(0.0, 9.5);
    const int roll = pick(rng);
    if (depth <= 0 || roll < 25) {
        if (roll % 2 == 0) return "x" + std::to_string(var(rng));
        return lyapcert::format_double(constant(rng));
    }
    if (roll < 40) {
        static const char* fns[] = {"sin", "cos", "tan", "tanh", "sech",
                                    "exp", "ln",  "abs", "sqrt"};
        return std::string(fns[roll % 9]) + "(" + random_expression(rng, depth - 1, n_vars) + ")";
    }
    if (roll < 50) {
        return "-" + random_expression(rng, depth - 1, n_vars);
    }
    if (roll < 58) {
        std::uniform_int_distribution<int> expo(2, 4);
        return "(" + random_expression(rng, depth - 1, n_vars) + ")^" +
               std::to_string(expo(rng));
    }
    static const char* ops[] = {" + ", " - ", "*", "/"};
    return "(" + random_expression(rng, depth - 1, n_vars) + ")" + ops[roll % 4] + "(" +
           random_expression(rng, depth - 1, n_vars) + ")";
}

/// Random expression that is smooth and safely evaluable on [-2, 2]^n:
/// sums/products of sin, cos, tanh, sech and small polynomials.
inline std::string random_smooth_expression(std::mt19937_64& rng, int depth, int n_vars) {
    std::uniform_int_distribution<int> pick(0, 99);
    std::uniform_int_distribution<int> var(1, n_vars);
    std::uniform_real_distribution<double> constant(-2.0, 2.0);
    const int roll = pick(rng);
    if (depth <= 0 || roll < 30) {
        if (roll % 2 == 0) return "x" + std::to_string(var(rng));
        return lyapcert::format_double(constant(rng));
    }
    if (roll < 55) {
        static const char* fns[] = {"sin", "cos", "tanh", "sech"};
        return std::string(fns[roll % 4]) + "(" +
               random_smooth_expression(rng, depth - 1, n_vars) + ")";
    }
    static const char* ops[] = {" + ", " - ", "*"};
    return "(" + random_smooth_expression(rng, depth - 1, n_vars) + ")" + ops[roll % 3] + "(" +
           random_smooth_expression(rng, depth - 1, n_vars) + ")";
}

} // namespace oracles
