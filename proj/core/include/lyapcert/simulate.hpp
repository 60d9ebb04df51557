#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyapcert/system.hpp"

namespace lyapcert {

enum class IntegratorKind { rk4, rkf45 };

[[nodiscard]] const char* to_string(IntegratorKind k);

struct IntegratorConfig {
    IntegratorKind kind = IntegratorKind::rkf45;
    double dt = 1e-3;          // fixed step (rk4)
    double abs_tol = 1e-9;     // adaptive tolerances (rkf45)
    double rel_tol = 1e-9;
    double blowup_norm = 1e6;  // state norm beyond which the run is cut off
};

enum class TrajectoryStatus { completed, diverged };

/// One integrated trajectory. times are strictly increasing; states stay
/// finite — divergence truncates the record with a flag instead of emitting
/// non-finite states. v_values carries V(x(t)) = (1/2)||x(t)||^2 per step.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> v_values;
    double terminal_norm = 0.0;
    TrajectoryStatus status = TrajectoryStatus::completed;
    IntegratorKind integrator = IntegratorKind::rkf45;
};

/// Integrates x' = g(x) from x0 over [0, t_end]. Classic RK4 at fixed dt, or
/// RKF45 with the embedded 4th/5th-order error estimate and step control.
/// Throws ConvergenceError on adaptive step-size underflow.
TrajectoryRecord integrate(const SystemDef& sys, std::span<const double> x0, double t_end,
                           const IntegratorConfig& config = {});

struct ExperimentSummary {
    int count = 0;
    int converged = 0;           // terminal_norm < convergence_threshold
    int diverged = 0;
    double max_terminal_norm = 0.0;
    int v_violations = 0;        // steps with V increasing beyond 1e-9
    double convergence_threshold = 1e-6;
};

/// Integrates `count` seeded-uniform initial conditions in the ball of the
/// given radius and summarizes convergence; divergences are counted, never
/// thrown. Results are deterministic in (seed, count, radius).
ExperimentSummary convergence_experiment(const SystemDef& sys, double radius, int count,
                                         double t_end, std::uint64_t seed,
                                         const IntegratorConfig& config = {});

} // namespace lyapcert
