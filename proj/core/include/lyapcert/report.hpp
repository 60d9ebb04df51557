#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lyapcert/criteria.hpp"
#include "lyapcert/simulate.hpp"
#include "lyapcert/systemfile.hpp"

namespace lyapcert {

inline constexpr const char* k_tool_name = "lyapcert";
inline constexpr const char* k_tool_version = "0.1.0";

/// Effective analysis settings after merging defaults <- file <- flags.
struct AnalysisConfig {
    double quad_tol = 1e-10;
    double margin = 1e-9;
    double horizon = 100.0;
    std::uint64_t seed = 0;
    std::optional<int> samples; // approximate per-shell sample target
    int sim_count = 20;         // trajectories behind the analyze summary
    double sim_tend = 20.0;
};

void apply_overrides(AnalysisConfig& cfg, const AnalysisOverrides& file_overrides);

SamplingPlan make_plan(const AnalysisConfig& cfg);
QuadratureOptions make_quad(const AnalysisConfig& cfg);

struct AnalyzeOutcome {
    std::string report_json;       // deterministic except for the timings block
    Classification classification; // theorem2 verdict, drives the exit code
};

/// Runs the theorem2 classifier, the lakshmikantham variant, and the
/// Krasovskii baseline (P = I), plus a short convergence experiment inside
/// any certified region.
AnalyzeOutcome run_analyze(const LoadedSystem& loaded, const AnalysisConfig& cfg);

struct RegionOutcome {
    double radius = 0.0;
    std::string report_json;
};

RegionOutcome run_region(const LoadedSystem& loaded, const AnalysisConfig& cfg, double r_max,
                         double tol);

struct SimulateRequest {
    std::optional<Vec> x0;     // explicit initial state, or
    int random_count = 0;      // seeded-random states in the ball
    std::optional<double> radius; // ball for random states (default: system ball or 5)
    double t_end = 20.0;
    IntegratorKind integrator = IntegratorKind::rkf45;
    std::optional<std::string> csv_prefix; // write <prefix><index>.csv per trajectory
};

struct SimulateOutcome {
    std::string summary_json;
    std::vector<std::string> csv_files;
};

SimulateOutcome run_simulate(const LoadedSystem& loaded, const AnalysisConfig& cfg,
                             const SimulateRequest& request);

/// CSV rows x1..xn,beta1..betan over an N x N grid on [-extent, extent]^2
/// (2-dimensional systems only).
std::string beta_field_grid_csv(const LoadedSystem& loaded, const AnalysisConfig& cfg,
                                int grid, double extent);

/// Sample-mode variant: CSV over the plan's points, any dimension.
std::string beta_field_samples_csv(const LoadedSystem& loaded, const AnalysisConfig& cfg);

std::string trajectory_csv(const TrajectoryRecord& record);

} // namespace lyapcert
