#include "lyapcert/ray.hpp"

#include <algorithm>
#include <cmath>

namespace lyapcert {

namespace {

// 4-node Gauss-Legendre rule on [-1, 1]
struct GaussRule {
    double node[4];
    double weight[4];
    GaussRule() {
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        node[0] = -b; node[1] = -a; node[2] = a; node[3] = b;
        weight[0] = wb; weight[1] = wa; weight[2] = wa; weight[3] = wb;
    }
};
const GaussRule k_rule;

class RayIntegrator {
public:
    RayIntegrator(const SystemDef& sys, std::span<const double> point, double tol)
        : sys_(sys), point_(point.begin(), point.end()), tol_(tol), n_(sys.dim()),
          scratch_point_(point.size()), scratch_jac_(n_, n_) {}

    Matrix integrate(int max_depth) {
        evals_ = 0;
        Matrix whole = panel(0.0, 1.0);
        Matrix total(n_, n_);
        refine(0.0, 1.0, whole, max_depth, total);
        return total;
    }

    [[nodiscard]] int evals() const noexcept { return evals_; }

private:
    Matrix panel(double a, double b) {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        Matrix acc(n_, n_);
        for (int k = 0; k < 4; ++k) {
            const double s = mid + half * k_rule.node[k];
            for (int i = 0; i < n_; ++i) scratch_point_[i] = s * point_[i];
            sys_.jacobian_into(scratch_point_, scratch_jac_);
            ++evals_;
            const double w = half * k_rule.weight[k];
            for (std::size_t m = 0; m < acc.a.size(); ++m) acc.a[m] += w * scratch_jac_.a[m];
        }
        return acc;
    }

    void refine(double a, double b, const Matrix& whole, int depth, Matrix& total) {
        const double mid = 0.5 * (a + b);
        Matrix left = panel(a, mid);
        Matrix right = panel(mid, b);
        double diff = 0.0;
        for (std::size_t m = 0; m < whole.a.size(); ++m) {
            diff = std::max(diff, std::fabs(left.a[m] + right.a[m] - whole.a[m]));
        }
        // per-panel budget proportional to its share of [0,1]
        if (diff < tol_ * (b - a) || depth <= 0) {
            if (depth <= 0 && diff >= tol_ * (b - a)) {
                throw QuadratureError(
                    "ray integral did not converge within the panel depth limit; "
                    "the field may not be continuously differentiable along the ray");
            }
            for (std::size_t m = 0; m < total.a.size(); ++m) {
                total.a[m] += left.a[m] + right.a[m];
            }
            return;
        }
        refine(a, mid, left, depth - 1, total);
        refine(mid, b, right, depth - 1, total);
    }

    const SystemDef& sys_;
    Vec point_;
    double tol_;
    int n_;
    Vec scratch_point_;
    Matrix scratch_jac_;
    int evals_ = 0;
};

double reconstruction_residual(const Matrix& d, std::span<const double> x,
                               std::span<const double> g) {
    double s = 0.0;
    for (int i = 0; i < d.rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < d.cols; ++j) row += d(i, j) * x[j];
        const double r = row - g[i];
        s += r * r;
    }
    return std::sqrt(s);
}

} // namespace

RayMatrix ray_matrix(const SystemDef& sys, std::span<const double> point,
                     const QuadratureOptions& opt) {
    if (!(opt.tol > 0.0)) {
        throw Error("quadrature tolerance must be positive");
    }
    const int n = sys.dim();
    if (static_cast<int>(point.size()) != n) {
        throw EvalError("point dimension does not match the system");
    }

    RayMatrix result;
    result.point.assign(point.begin(), point.end());

    const bool at_origin =
        std::all_of(point.begin(), point.end(), [](double v) { return v == 0.0; });
    if (at_origin) {
        // the ray degenerates: the integrand is constant, so D(0) = J(0)
        result.entries = sys.jacobian(point);
        result.node_count = 1;
        result.est_error = 0.0;
        return result;
    }

    const Vec g = sys.eval(point);
    const double bound = 1e-8 * (1.0 + norm2(g));

    RayIntegrator integ(sys, point, opt.tol);
    result.entries = integ.integrate(opt.max_depth);
    result.node_count = integ.evals();
    result.est_error = reconstruction_residual(result.entries, point, g);
    if (result.est_error > bound) {
        // one retry with doubled depth before giving up
        result.entries = integ.integrate(opt.max_depth * 2);
        result.node_count += integ.evals();
        result.est_error = reconstruction_residual(result.entries, point, g);
        if (result.est_error > bound) {
            throw QuadratureError("ray factorization failed its reconstruction identity: "
                                  "||D(x)x - g(x)|| = " +
                                  format_double(result.est_error) + " > " +
                                  format_double(bound));
        }
    }
    return result;
}

Matrix ray_matrix_single_panel(const SystemDef& sys, std::span<const double> point) {
    const int n = sys.dim();
    Matrix acc(n, n);
    Vec sp(point.size());
    Matrix jac(n, n);
    for (int k = 0; k < 4; ++k) {
        const double s = 0.5 + 0.5 * k_rule.node[k];
        for (int i = 0; i < n; ++i) sp[i] = s * point[i];
        sys.jacobian_into(sp, jac);
        const double w = 0.5 * k_rule.weight[k];
        for (std::size_t m = 0; m < acc.a.size(); ++m) acc.a[m] += w * jac.a[m];
    }
    return acc;
}

RowDecomposition decoupled_row(const RayMatrix& ray, int i) {
    const int n = ray.entries.rows;
    if (i < 0 || i >= n) {
        throw Error("row index out of range");
    }
    RowDecomposition rd;
    rd.diag_term = ray.entries(i, i) * ray.point[i];
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        rd.offdiag_sum += ray.entries(i, j) * ray.point[j];
    }
    return rd;
}

} // namespace lyapcert
