#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lyapcert/linalg.hpp"

namespace lyapcert {

/// Deterministic sampling configuration shared by the classifiers. The same
/// plan and seed always reproduce the same points.
///
/// In 2D (and 1D) the plan is a uniform polar grid whose radii sit at
/// midpoints (j - 1/2) R / polar_radii of (0, R], so samples stay strictly
/// inside the open ball. In higher dimensions it is halton_per_shell
/// low-discrepancy points per shell: one shell for a bounded ball, `shells`
/// expanding annuli up to the horizon for unbounded domains.
struct SamplingPlan {
    std::uint64_t seed = 0;
    double margin = 1e-9;    // strict-negativity safety margin
    double horizon = 100.0;  // sampled radius standing in for "all of R^n"
    int polar_radii = 64;
    int polar_directions = 128;
    int halton_per_shell = 4096;
    int shells = 8;
};

struct SampleSet {
    std::vector<Vec> points;
    double radius = 0.0;          // outermost radius covered
    bool horizon_limited = false; // domain was unbounded, truncated at horizon
};

/// Generates the plan's points for a system of the given dimension.
/// ball_radius nullopt = unbounded domain (expanding shells to the horizon).
SampleSet sample_domain(const SamplingPlan& plan, int dim,
                        std::optional<double> ball_radius);

/// Radical-inverse Halton value for a 1-based index in the given prime base.
double halton(std::uint64_t index, int base);

/// Deterministic start offset into the Halton sequence for a seed.
std::uint64_t halton_offset(std::uint64_t seed);

} // namespace lyapcert
