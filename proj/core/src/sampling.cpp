#include "lyapcert/sampling.hpp"

#include <cmath>

#include "lyapcert/errors.hpp"

namespace lyapcert {

namespace {

constexpr int k_primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
constexpr int k_num_primes = static_cast<int>(sizeof(k_primes) / sizeof(k_primes[0]));
constexpr double k_pi = 3.14159265358979323846;

void polar_points(const SamplingPlan& plan, double radius, std::vector<Vec>& out) {
    for (int j = 1; j <= plan.polar_radii; ++j) {
        const double r = radius * (j - 0.5) / plan.polar_radii;
        for (int k = 0; k < plan.polar_directions; ++k) {
            const double theta = 2.0 * k_pi * k / plan.polar_directions;
            out.push_back({r * std::cos(theta), r * std::sin(theta)});
        }
    }
}

void line_points(const SamplingPlan& plan, double radius, std::vector<Vec>& out) {
    for (int j = 1; j <= plan.polar_radii; ++j) {
        const double r = radius * (j - 0.5) / plan.polar_radii;
        out.push_back({r});
        out.push_back({-r});
    }
}

// Halton points in the cube [-r_outer, r_outer]^dim, kept when they land in
// the open annulus (r_inner, r_outer). The cursor advances deterministically
// so shells drawn in order never reuse an index.
void shell_points(const SamplingPlan& plan, int dim, double r_inner, double r_outer,
                  std::uint64_t& cursor, std::vector<Vec>& out) {
    if (dim > k_num_primes) {
        throw Error("sampling supports at most " + std::to_string(k_num_primes) +
                    " dimensions");
    }
    const std::uint64_t budget = 400ull * static_cast<std::uint64_t>(plan.halton_per_shell);
    int kept = 0;
    Vec p(static_cast<std::size_t>(dim));
    for (std::uint64_t tries = 0; kept < plan.halton_per_shell; ++tries, ++cursor) {
        if (tries > budget) {
            throw Error("could not fill a sampling shell in dimension " + std::to_string(dim) +
                        "; the annulus is too thin for cube rejection");
        }
        for (int d = 0; d < dim; ++d) {
            p[d] = (2.0 * halton(cursor, k_primes[d]) - 1.0) * r_outer;
        }
        const double r = norm2(p);
        if (r > r_inner && r < r_outer) {
            out.push_back(p);
            ++kept;
        }
    }
}

} // namespace

double halton(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
        index /= static_cast<std::uint64_t>(base);
        f /= base;
    }
    return result;
}

std::uint64_t halton_offset(std::uint64_t seed) { return 1 + seed % 65521; }

SampleSet sample_domain(const SamplingPlan& plan, int dim,
                        std::optional<double> ball_radius) {
    if (dim < 1) {
        throw Error("sampling requires dimension >= 1");
    }
    if (plan.polar_radii < 1 || plan.polar_directions < 1 || plan.halton_per_shell < 1 ||
        plan.shells < 1) {
        throw Error("sampling plan is empty");
    }
    SampleSet set;
    set.horizon_limited = !ball_radius.has_value();
    set.radius = ball_radius.value_or(plan.horizon);
    if (!(set.radius > 0.0) || !std::isfinite(set.radius)) {
        throw Error("sampling radius must be positive and finite");
    }

    if (dim == 1) {
        line_points(plan, set.radius, set.points);
    } else if (dim == 2) {
        polar_points(plan, set.radius, set.points);
    } else {
        std::uint64_t cursor = halton_offset(plan.seed);
        const int shells = ball_radius ? 1 : plan.shells;
        for (int m = 1; m <= shells; ++m) {
            const double r_in = set.radius * (m - 1) / shells;
            const double r_out = set.radius * m / shells;
            shell_points(plan, dim, r_in, r_out, cursor, set.points);
        }
    }
    return set;
}

} // namespace lyapcert
