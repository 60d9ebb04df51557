#include "lyapcert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lyapcert {

const char* to_string(IntegratorKind k) {
    switch (k) {
        case IntegratorKind::rk4: return "rk4";
        case IntegratorKind::rkf45: return "rkf45";
    }
    return "?";
}

namespace {

double half_norm_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s;
}

void record_state(TrajectoryRecord& rec, double t, const Vec& x) {
    rec.times.push_back(t);
    rec.states.push_back(x);
    rec.v_values.push_back(half_norm_sq(x));
}

struct Rk4Stepper {
    const SystemDef& sys;
    Vec k1, k2, k3, k4, tmp;

    explicit Rk4Stepper(const SystemDef& s)
        : sys(s), k1(s.dim()), k2(s.dim()), k3(s.dim()), k4(s.dim()), tmp(s.dim()) {}

    void step(Vec& x, double h) {
        const std::size_t n = x.size();
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
    }
};

// Fehlberg 4(5) tableau
struct Rkf45Stepper {
    const SystemDef& sys;
    Vec k1, k2, k3, k4, k5, k6, tmp, y5;

    explicit Rkf45Stepper(const SystemDef& s)
        : sys(s), k1(s.dim()), k2(s.dim()), k3(s.dim()), k4(s.dim()), k5(s.dim()),
          k6(s.dim()), tmp(s.dim()), y5(s.dim()) {}

    /// Attempts one step of size h from x. Returns the scaled error measure
    /// (<= 1 means acceptable); y5 holds the 5th-order candidate state.
    double attempt(const Vec& x, double h, double abs_tol, double rel_tol) {
        const std::size_t n = x.size();
        sys.eval_into(x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * (0.25 * k1[i]);
        sys.eval_into(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + h * (3.0 / 32.0 * k1[i] + 9.0 / 32.0 * k2[i]);
        }
        sys.eval_into(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + h * (1932.0 / 2197.0 * k1[i] - 7200.0 / 2197.0 * k2[i] +
                                 7296.0 / 2197.0 * k3[i]);
        }
        sys.eval_into(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + h * (439.0 / 216.0 * k1[i] - 8.0 * k2[i] +
                                 3680.0 / 513.0 * k3[i] - 845.0 / 4104.0 * k4[i]);
        }
        sys.eval_into(tmp, k5);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + h * (-8.0 / 27.0 * k1[i] + 2.0 * k2[i] - 3544.0 / 2565.0 * k3[i] +
                                 1859.0 / 4104.0 * k4[i] - 11.0 / 40.0 * k5[i]);
        }
        sys.eval_into(tmp, k6);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y4 = x[i] + h * (25.0 / 216.0 * k1[i] + 1408.0 / 2565.0 * k3[i] +
                                          2197.0 / 4104.0 * k4[i] - 0.2 * k5[i]);
            y5[i] = x[i] + h * (16.0 / 135.0 * k1[i] + 6656.0 / 12825.0 * k3[i] +
                                28561.0 / 56430.0 * k4[i] - 9.0 / 50.0 * k5[i] +
                                2.0 / 55.0 * k6[i]);
            const double scale = abs_tol + rel_tol * std::max(std::fabs(x[i]), std::fabs(y5[i]));
            err = std::max(err, std::fabs(y5[i] - y4) / scale);
        }
        return err;
    }
};

} // namespace

TrajectoryRecord integrate(const SystemDef& sys, std::span<const double> x0, double t_end,
                           const IntegratorConfig& config) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw Error("t_end must be positive and finite");
    }
    if (static_cast<int>(x0.size()) != sys.dim()) {
        throw Error("x0 dimension does not match the system");
    }
    for (double v : x0) {
        if (!std::isfinite(v)) throw Error("x0 must be finite");
    }

    TrajectoryRecord rec;
    rec.integrator = config.kind;
    Vec x(x0.begin(), x0.end());
    record_state(rec, 0.0, x);

    auto diverged = [&](double) {
        rec.status = TrajectoryStatus::diverged;
        rec.terminal_norm = norm2(rec.states.back());
        return rec;
    };

    const double t_eps = 1e-14 * std::max(1.0, t_end);

    if (config.kind == IntegratorKind::rk4) {
        Rk4Stepper stepper(sys);
        const double dt = config.dt;
        if (!(dt > 0.0)) throw Error("rk4 requires dt > 0");
        double t = 0.0;
        while (t_end - t > t_eps) {
            const double h = std::min(dt, t_end - t);
            Vec prev = x;
            try {
                stepper.step(x, h);
            } catch (const EvalError&) {
                x = prev;
                return diverged(t);
            }
            t += h;
            if (norm2(x) > config.blowup_norm) {
                record_state(rec, t, x);
                return diverged(t);
            }
            record_state(rec, t, x);
        }
    } else {
        Rkf45Stepper stepper(sys);
        double t = 0.0;
        double h = std::min(0.01, t_end);
        while (t_end - t > t_eps) {
            h = std::min(h, t_end - t);
            if (h < t_eps) {
                throw ConvergenceError("adaptive step size underflow at t = " +
                                       format_double(t));
            }
            double err;
            try {
                err = stepper.attempt(x, h, config.abs_tol, config.rel_tol);
            } catch (const EvalError&) {
                return diverged(t);
            }
            if (!std::isfinite(err)) {
                return diverged(t);
            }
            if (err <= 1.0) {
                t += h;
                x = stepper.y5;
                if (norm2(x) > config.blowup_norm) {
                    record_state(rec, t, x);
                    return diverged(t);
                }
                record_state(rec, t, x);
            }
            const double factor =
                err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
        }
    }
    rec.terminal_norm = norm2(rec.states.back());
    return rec;
}

ExperimentSummary convergence_experiment(const SystemDef& sys, double radius, int count,
                                         double t_end, std::uint64_t seed,
                                         const IntegratorConfig& config) {
    if (radius < 0.0 || !std::isfinite(radius)) {
        throw Error("experiment radius must be non-negative and finite");
    }
    if (count < 1) {
        throw Error("experiment count must be >= 1");
    }

    const int n = sys.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ExperimentSummary summary;
    summary.count = count;

    for (int trial = 0; trial < count; ++trial) {
        Vec x0(static_cast<std::size_t>(n), 0.0);
        if (radius > 0.0) {
            double norm = 0.0;
            for (int i = 0; i < n; ++i) {
                x0[i] = normal(rng);
                norm += x0[i] * x0[i];
            }
            norm = std::sqrt(norm);
            const double r = radius * std::pow(unit(rng), 1.0 / n);
            if (norm > 0.0) {
                for (int i = 0; i < n; ++i) x0[i] *= r / norm;
            }
        }
        const TrajectoryRecord rec = integrate(sys, x0, t_end, config);
        if (rec.status == TrajectoryStatus::diverged) {
            ++summary.diverged;
        } else if (rec.terminal_norm < summary.convergence_threshold) {
            ++summary.converged;
        }
        summary.max_terminal_norm = std::max(summary.max_terminal_norm, rec.terminal_norm);
        for (std::size_t k = 1; k < rec.v_values.size(); ++k) {
            if (rec.v_values[k] > rec.v_values[k - 1] + 1e-9) {
                ++summary.v_violations;
            }
        }
    }
    return summary;
}

} // namespace lyapcert
