#pragma once

#include <span>

#include "lyapcert/linalg.hpp"
#include "lyapcert/system.hpp"

namespace lyapcert {

/// D(x): entry (i,j) is the Jacobian entry J_ij integrated along the ray
/// from the origin to x. Satisfies D(x) x = g(x) whenever g(0) = 0, which is
/// recorded as est_error and enforced as the module's correctness oracle.
struct RayMatrix {
    Vec point;
    Matrix entries;
    int node_count = 0;     // integrand (Jacobian) evaluations spent
    double est_error = 0.0; // reconstruction residual ||D(x)x - g(x)||
};

struct QuadratureOptions {
    double tol = 1e-10; // entrywise refinement tolerance
    int max_depth = 20; // panel bisection depth limit
};

/// Adaptive Gauss-Legendre (4 nodes per panel, recursive bisection) over the
/// ray. At x = 0 the integrand is constant and D(0) = J(0) is returned
/// exactly. If the reconstruction residual exceeds 1e-8 (1 + ||g||) the
/// computation retries once with doubled depth, then throws QuadratureError.
RayMatrix ray_matrix(const SystemDef& sys, std::span<const double> point,
                     const QuadratureOptions& opt = {});

/// Single fixed 4-node panel over [0,1], no adaptivity. Exact for polynomial
/// vector fields of total degree <= 7.
Matrix ray_matrix_single_panel(const SystemDef& sys, std::span<const double> point);

struct RowDecomposition {
    double diag_term = 0.0;    // d_ii(x) x_i
    double offdiag_sum = 0.0;  // sum over j != i of d_ij(x) x_j
};

/// Splits row i (0-based) of the factored system; the two terms sum to
/// g_i(x) within the reconstruction tolerance.
RowDecomposition decoupled_row(const RayMatrix& ray, int i);

} // namespace lyapcert
