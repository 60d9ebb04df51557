#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyapcert/linalg.hpp"
#include "lyapcert/ray.hpp"
#include "lyapcert/sampling.hpp"
#include "lyapcert/system.hpp"

namespace lyapcert {

/// Which per-component bound is computed from the ray matrix.
///   theorem2:       beta_i = d_ii + (1/2) sum_{j!=i} (|d_ij| + |d_ji|)
///   lakshmikantham: beta_i = d_ii + sum_{j!=i} |d_ij|
enum class BetaVariant { theorem2, lakshmikantham };

[[nodiscard]] const char* to_string(BetaVariant v);

struct BetaProfile {
    Vec point;
    Vec values;
    BetaVariant variant = BetaVariant::theorem2;
    double est_error = 0.0; // quadrature slack carried from the ray matrix
    int node_count = 0;
};

/// Computes the bound vector directly from an already-evaluated ray matrix.
Vec beta_from_matrix(const Matrix& d, BetaVariant variant);

BetaProfile beta_profile(const SystemDef& sys, std::span<const double> point,
                         BetaVariant variant = BetaVariant::theorem2,
                         const QuadratureOptions& quad = {});

enum class Classification {
    stable,
    asymptotically_stable,
    globally_asymptotically_stable,
    inconclusive,
};

[[nodiscard]] const char* to_string(Classification c);

struct BetaEvidence {
    Vec sup_beta;                 // per-component sampled supremum
    std::vector<Vec> argmax;      // point achieving each supremum
    int sample_count = 0;
    double margin = 0.0;
};

struct Witness {
    Vec point;
    int component = 0; // 0-based
    double beta = 0.0;
};

struct StabilityVerdict {
    Classification classification = Classification::inconclusive;
    /// Radius of the certified ball; +infinity means unbounded (GAS).
    double certified_radius = 0.0;
    /// Sampling horizon backing any global claim; absent for bounded balls.
    std::optional<double> horizon;
    bool condition_a = false; // beta <= 0 on all samples (within margin)
    bool condition_b = false; // beta < 0 strictly on all samples
    bool condition_c = false; // condition_b sampled out to the horizon
    BetaEvidence evidence;
    std::optional<Witness> violation_witness;
};

/// Samples the declared ball (or expanding shells up to plan.horizon when
/// the ball is unbounded) and returns the strongest certified classification.
/// A sample with beta_i beyond +margin becomes a violation witness; the
/// verdict then falls back to the largest certifiable sub-ball.
StabilityVerdict classify(const SystemDef& sys, const SamplingPlan& plan = {},
                          const QuadratureOptions& quad = {});

struct RadiusSearch {
    double radius = 0.0;
    bool any_passed = false;
    std::optional<Witness> first_violation;
    int samples_evaluated = 0;
    std::string diagnostic;
};

/// Bisection over r in (0, r_max]: a radius passes when every sample within
/// it keeps all beta_i strictly negative (margin-gated). The sample grid is
/// anchored at the origin with radial spacing tol/2, so the predicate is
/// nested and the result is monotone in r_max. Returns 0 with a diagnostic
/// when no radius certifies.
RadiusSearch certified_radius_search(const SystemDef& sys, double r_max, double tol,
                                     const SamplingPlan& plan = {},
                                     const QuadratureOptions& quad = {});

struct LakshmikanthamVerdict {
    Classification classification = Classification::inconclusive;
    BetaEvidence evidence;
    std::optional<Witness> witness;
    std::optional<double> horizon;
    std::string note;
};

/// Row-sum criterion: requires beta_i < 0 only at samples where component i
/// is (weakly) the largest in magnitude. Its conclusion is inherently
/// global, so only unbounded systems can receive a GAS verdict.
LakshmikanthamVerdict lakshmikantham_classify(const SystemDef& sys,
                                              const SamplingPlan& plan = {},
                                              const QuadratureOptions& quad = {});

enum class KrasovskiiOutcome { negative_definite_on_samples, indefinite };

[[nodiscard]] const char* to_string(KrasovskiiOutcome o);

struct KrasovskiiReport {
    Matrix p;
    double max_eig_field = 0.0; // sampled supremum of lambda_max(PJ + J^T P)
    KrasovskiiOutcome outcome = KrasovskiiOutcome::indefinite;
    std::optional<Vec> witness;
    int sample_count = 0;
};

/// Samples lambda_max(P J(x) + J(x)^T P) via the cyclic Jacobi eigensolver.
/// P defaults to the identity and must be symmetric positive definite.
KrasovskiiReport krasovskii_check(const SystemDef& sys,
                                  const std::optional<Matrix>& p = std::nullopt,
                                  const SamplingPlan& plan = {});

/// lambda_max(P J(point) + J(point)^T P) at one point.
double krasovskii_lambda_max(const SystemDef& sys, const Matrix& p,
                             std::span<const double> point);

/// V'(x) = sum_i x_i g_i(x) for the quadratic V(x) = (1/2) sum x_i^2.
double lyapunov_derivative(const SystemDef& sys, std::span<const double> point);

} // namespace lyapcert
