#include "lyapcert/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lyapcert {

const char* to_string(BetaVariant v) {
    switch (v) {
        case BetaVariant::theorem2: return "theorem2";
        case BetaVariant::lakshmikantham: return "lakshmikantham";
    }
    return "?";
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::stable: return "stable";
        case Classification::asymptotically_stable: return "asymptotically_stable";
        case Classification::globally_asymptotically_stable:
            return "globally_asymptotically_stable";
        case Classification::inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(KrasovskiiOutcome o) {
    switch (o) {
        case KrasovskiiOutcome::negative_definite_on_samples:
            return "negative_definite_on_samples";
        case KrasovskiiOutcome::indefinite: return "indefinite";
    }
    return "?";
}

Vec beta_from_matrix(const Matrix& d, BetaVariant variant) {
    const int n = d.rows;
    Vec beta(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double b = d(i, i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (variant == BetaVariant::theorem2) {
                b += 0.5 * (std::fabs(d(i, j)) + std::fabs(d(j, i)));
            } else {
                b += std::fabs(d(i, j));
            }
        }
        beta[i] = b;
    }
    return beta;
}

BetaProfile beta_profile(const SystemDef& sys, std::span<const double> point,
                         BetaVariant variant, const QuadratureOptions& quad) {
    RayMatrix ray = ray_matrix(sys, point, quad);
    BetaProfile p;
    p.point = std::move(ray.point);
    p.values = beta_from_matrix(ray.entries, variant);
    p.variant = variant;
    p.est_error = ray.est_error;
    p.node_count = ray.node_count;
    return p;
}

namespace {

struct SweepStats {
    Vec sup_beta;
    std::vector<Vec> argmax;
    std::optional<Witness> witness; // first beta beyond +slack
    bool all_strictly_negative = true;
    bool all_nonpositive = true;

    explicit SweepStats(int n)
        : sup_beta(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity()),
          argmax(static_cast<std::size_t>(n)) {}

    void absorb(const Vec& point, const Vec& beta, double slack) {
        for (std::size_t i = 0; i < beta.size(); ++i) {
            if (beta[i] > sup_beta[i]) {
                sup_beta[i] = beta[i];
                argmax[i] = point;
            }
            if (!(beta[i] < -slack)) all_strictly_negative = false;
            if (beta[i] > slack) {
                all_nonpositive = false;
                if (!witness) {
                    witness = Witness{point, static_cast<int>(i), beta[i]};
                }
            }
        }
    }
};

BetaEvidence make_evidence(SweepStats& stats, int sample_count, double margin) {
    BetaEvidence ev;
    ev.sup_beta = std::move(stats.sup_beta);
    ev.argmax = std::move(stats.argmax);
    ev.sample_count = sample_count;
    ev.margin = margin;
    return ev;
}

} // namespace

StabilityVerdict classify(const SystemDef& sys, const SamplingPlan& plan,
                          const QuadratureOptions& quad) {
    const SampleSet samples = sample_domain(plan, sys.dim(), sys.ball_radius());
    if (samples.points.empty()) {
        throw Error("sampling plan produced no points");
    }

    SweepStats stats(sys.dim());
    for (const Vec& p : samples.points) {
        RayMatrix ray = ray_matrix(sys, p, quad);
        const Vec beta = beta_from_matrix(ray.entries, BetaVariant::theorem2);
        stats.absorb(p, beta, plan.margin + ray.est_error);
    }

    StabilityVerdict verdict;
    verdict.condition_b = stats.all_strictly_negative;
    verdict.condition_a = stats.all_nonpositive;
    verdict.condition_c = stats.all_strictly_negative && samples.horizon_limited;
    verdict.violation_witness = stats.witness;
    verdict.evidence =
        make_evidence(stats, static_cast<int>(samples.points.size()), plan.margin);

    if (verdict.condition_c) {
        verdict.classification = Classification::globally_asymptotically_stable;
        verdict.certified_radius = std::numeric_limits<double>::infinity();
        verdict.horizon = samples.radius;
    } else if (verdict.condition_b) {
        verdict.classification = Classification::asymptotically_stable;
        verdict.certified_radius = samples.radius;
    } else if (verdict.violation_witness) {
        // beta crosses zero inside the declared domain: certify the largest
        // sub-ball that still passes
        const double tol = std::clamp(samples.radius * 1e-3, 1e-6, 0.1);
        RadiusSearch sub = certified_radius_search(sys, samples.radius, tol, plan, quad);
        if (sub.radius > 0.0) {
            verdict.classification = Classification::asymptotically_stable;
            verdict.certified_radius = sub.radius;
        } else {
            verdict.classification = Classification::inconclusive;
            verdict.certified_radius = 0.0;
        }
        if (samples.horizon_limited) verdict.horizon = samples.radius;
    } else {
        // beta touches zero (within margin) but never crosses it
        verdict.classification = Classification::stable;
        verdict.certified_radius = samples.radius;
        if (samples.horizon_limited) verdict.horizon = samples.radius;
    }
    return verdict;
}

namespace {

struct RadiusScanner {
    const SystemDef& sys;
    const SamplingPlan& plan;
    const QuadratureOptions& quad;
    int evaluated = 0;

    /// Scans points (sorted by norm) and returns the first failing one, if
    /// any; all points before it have been checked strictly negative.
    std::optional<Witness> first_failure(const std::vector<std::pair<double, Vec>>& pts) {
        for (const auto& [norm, x] : pts) {
            RayMatrix ray = ray_matrix(sys, x, quad);
            const Vec beta = beta_from_matrix(ray.entries, BetaVariant::theorem2);
            const double slack = plan.margin + ray.est_error;
            ++evaluated;
            for (std::size_t i = 0; i < beta.size(); ++i) {
                if (!(beta[i] < -slack)) {
                    return Witness{x, static_cast<int>(i), beta[i]};
                }
            }
        }
        return std::nullopt;
    }
};

/// Polar rings at midpoint radii (j - 1/2) spacing within (lo, hi], anchored
/// at the origin so grids for different r_max share a prefix.
std::vector<std::pair<double, Vec>> polar_rings(int dim, int directions, double spacing,
                                                double lo, double hi) {
    std::vector<std::pair<double, Vec>> pts;
    for (int j = 1;; ++j) {
        const double r = (j - 0.5) * spacing;
        if (r > hi) break;
        if (r <= lo) continue;
        if (dim == 1) {
            pts.push_back({r, {r}});
            pts.push_back({r, {-r}});
        } else {
            for (int k = 0; k < directions; ++k) {
                const double theta = 2.0 * 3.14159265358979323846 * k / directions;
                pts.push_back({r, {r * std::cos(theta), r * std::sin(theta)}});
            }
        }
    }
    return pts;
}

} // namespace

RadiusSearch certified_radius_search(const SystemDef& sys, double r_max, double tol,
                                     const SamplingPlan& plan,
                                     const QuadratureOptions& quad) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
        throw Error("r_max must be positive and finite");
    }
    if (!(tol > 0.0)) {
        throw Error("tolerance must be positive");
    }

    const int n = sys.dim();
    RadiusScanner scanner{sys, plan, quad};
    RadiusSearch result;

    double first_fail = std::numeric_limits<double>::infinity();
    double min_norm = std::numeric_limits<double>::infinity();

    if (n <= 2) {
        // coarse rings first; a bounded fine window only where they fail,
        // keeping the sampled radius accurate to tol near the boundary
        const double coarse = std::min(16.0 * tol, r_max / 16.0);
        const double fine = 0.5 * tol;
        auto pts = polar_rings(n, plan.polar_directions, coarse, 0.0, r_max);
        if (pts.empty()) {
            result.diagnostic = "no samples inside r_max";
            return result;
        }
        min_norm = pts.front().first;
        if (auto coarse_fail = scanner.first_failure(pts)) {
            first_fail = norm2(coarse_fail->point);
            result.first_violation = coarse_fail;
            const double window_lo = std::max(0.0, first_fail - 2.0 * coarse);
            auto window = polar_rings(n, plan.polar_directions, fine, window_lo, first_fail);
            if (auto fine_fail = scanner.first_failure(window)) {
                const double r = norm2(fine_fail->point);
                if (r < first_fail) {
                    first_fail = r;
                    result.first_violation = fine_fail;
                }
            }
            if (!window.empty()) min_norm = std::min(min_norm, window.front().first);
        }
    } else {
        SampleSet set = sample_domain(plan, n, r_max);
        std::vector<std::pair<double, Vec>> pts;
        pts.reserve(set.points.size());
        for (Vec& p : set.points) {
            const double r = norm2(p);
            pts.push_back({r, std::move(p)});
        }
        std::stable_sort(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        if (pts.empty()) {
            result.diagnostic = "no samples inside r_max";
            return result;
        }
        min_norm = pts.front().first;
        if (auto fail = scanner.first_failure(pts)) {
            first_fail = norm2(fail->point);
            result.first_violation = fail;
        }
    }
    result.samples_evaluated = scanner.evaluated;

    // all evaluated samples below first_fail are strictly negative, so the
    // pass predicate reduces to r < first_fail (with at least one sample)
    auto predicate = [&](double r) { return r >= min_norm && r < first_fail; };

    if (predicate(r_max)) {
        result.radius = r_max;
        result.any_passed = true;
        return result;
    }
    double lo = 0.0;
    double hi = r_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (predicate(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    result.radius = lo;
    result.any_passed = lo > 0.0;
    if (!result.any_passed) {
        result.diagnostic = "no radius passes the strict-negativity check";
        if (result.first_violation) {
            result.diagnostic += " (beta" + std::to_string(result.first_violation->component + 1) +
                                 " = " + format_double(result.first_violation->beta) +
                                 " at ||x|| = " + format_double(first_fail) + ")";
        }
    }
    return result;
}

LakshmikanthamVerdict lakshmikantham_classify(const SystemDef& sys, const SamplingPlan& plan,
                                              const QuadratureOptions& quad) {
    const SampleSet samples = sample_domain(plan, sys.dim(), sys.ball_radius());
    if (samples.points.empty()) {
        throw Error("sampling plan produced no points");
    }

    const int n = sys.dim();
    SweepStats stats(n);
    bool holds = true;
    std::optional<Witness> witness;

    for (const Vec& p : samples.points) {
        RayMatrix ray = ray_matrix(sys, p, quad);
        const Vec beta = beta_from_matrix(ray.entries, BetaVariant::lakshmikantham);
        const double slack = plan.margin + ray.est_error;
        stats.absorb(p, beta, slack);

        double max_sq = 0.0;
        for (double v : p) max_sq = std::max(max_sq, v * v);
        for (int i = 0; i < n; ++i) {
            const bool applicable = p[i] * p[i] >= max_sq;
            if (applicable && !(beta[i] < -slack)) {
                holds = false;
                if (!witness) witness = Witness{p, i, beta[i]};
            }
        }
    }

    LakshmikanthamVerdict verdict;
    verdict.evidence = make_evidence(stats, static_cast<int>(samples.points.size()), plan.margin);
    verdict.witness = witness;
    if (holds && samples.horizon_limited) {
        verdict.classification = Classification::globally_asymptotically_stable;
        verdict.horizon = samples.radius;
    } else {
        verdict.classification = Classification::inconclusive;
        if (holds) {
            verdict.note = "criterion held on the bounded ball but its conclusion is global; "
                           "declare the system unbounded to certify";
        }
    }
    return verdict;
}

namespace {

Matrix symmetrized_product(const Matrix& p, const Matrix& j) {
    const int n = j.rows;
    Matrix m(n, n);
    // M = P J + J^T P, built symmetric by construction
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += p(r, k) * j(k, c) + j(k, r) * p(k, c);
            m(r, c) = s;
        }
    }
    return m;
}

} // namespace

double krasovskii_lambda_max(const SystemDef& sys, const Matrix& p,
                             std::span<const double> point) {
    const Matrix j = sys.jacobian(point);
    const std::vector<double> eig = jacobi_eigenvalues(symmetrized_product(p, j));
    return eig.back();
}

KrasovskiiReport krasovskii_check(const SystemDef& sys, const std::optional<Matrix>& p,
                                  const SamplingPlan& plan) {
    const int n = sys.dim();
    Matrix pm = p.value_or(Matrix::identity(n));
    if (pm.rows != n || pm.cols != n) {
        throw Error("P must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (!is_symmetric(pm, 1e-10)) {
        throw Error("P must be symmetric");
    }
    const std::vector<double> p_eig = jacobi_eigenvalues(pm);
    if (p_eig.front() <= 0.0) {
        throw Error("P must be positive definite (smallest eigenvalue " +
                    format_double(p_eig.front()) + ")");
    }

    const SampleSet samples = sample_domain(plan, n, sys.ball_radius());
    KrasovskiiReport report;
    report.p = pm;
    report.sample_count = static_cast<int>(samples.points.size());
    report.max_eig_field = -std::numeric_limits<double>::infinity();
    for (const Vec& x : samples.points) {
        const double lmax = krasovskii_lambda_max(sys, pm, x);
        report.max_eig_field = std::max(report.max_eig_field, lmax);
        if (lmax >= 0.0 && !report.witness) {
            report.witness = x;
        }
    }
    report.outcome = report.witness ? KrasovskiiOutcome::indefinite
                                    : KrasovskiiOutcome::negative_definite_on_samples;
    return report;
}

double lyapunov_derivative(const SystemDef& sys, std::span<const double> point) {
    const Vec g = sys.eval(point);
    return dot(point, g);
}

} // namespace lyapcert
