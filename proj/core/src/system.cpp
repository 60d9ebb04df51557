#include "lyapcert/system.hpp"

#include <algorithm>
#include <cmath>

namespace lyapcert {

namespace {

constexpr double k_origin_tol = 1e-10;
constexpr double k_equilibrium_pre_tol = 1e-8;

std::string describe_point(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += format_double(x[i]);
    }
    return s + ")";
}

} // namespace

ExpressionField::ExpressionField(std::vector<Expression> components)
    : components_(std::move(components)) {}

void ExpressionField::eval(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        out[i] = components_[i].eval(x);
    }
}

void ExpressionField::jacobian(std::span<const double> x, Matrix& out) const {
    const int n = dim();
    for (int j = 1; j <= n; ++j) {
        for (int i = 0; i < n; ++i) {
            out(i, j - 1) = components_[i].eval_dual(x, j).der;
        }
    }
}

ShiftedField::ShiftedField(std::shared_ptr<const VectorField> base, Vec shift)
    : base_(std::move(base)), shift_(std::move(shift)) {}

void ShiftedField::eval(std::span<const double> x, std::span<double> out) const {
    Vec y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift_[i];
    base_->eval(y, out);
}

void ShiftedField::jacobian(std::span<const double> x, Matrix& out) const {
    Vec y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift_[i];
    base_->jacobian(y, out);
}

Vec SystemDef::eval(std::span<const double> point) const {
    Vec out(static_cast<std::size_t>(dim()), 0.0);
    eval_into(point, out);
    return out;
}

void SystemDef::eval_into(std::span<const double> point, std::span<double> out) const {
    if (static_cast<int>(point.size()) != dim()) {
        throw EvalError("point dimension " + std::to_string(point.size()) +
                        " does not match system dimension " + std::to_string(dim()));
    }
    field_->eval(point, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i])) {
            throw EvalError("component g" + std::to_string(i + 1) +
                            " is non-finite at " + describe_point(point));
        }
    }
}

Matrix SystemDef::jacobian(std::span<const double> point) const {
    Matrix out(dim(), dim());
    jacobian_into(point, out);
    return out;
}

void SystemDef::jacobian_into(std::span<const double> point, Matrix& out) const {
    const int n = dim();
    if (static_cast<int>(point.size()) != n) {
        throw EvalError("point dimension " + std::to_string(point.size()) +
                        " does not match system dimension " + std::to_string(n));
    }
    if (out.rows != n || out.cols != n) out = Matrix(n, n);

    if (mode_ == JacobianMode::dual) {
        field_->jacobian(point, out);
    } else {
        // central differences, step scaled so relative accuracy is uniform
        // across the ball
        const double h = fd_step_ * std::max(1.0, norm2(point));
        thread_local Vec xp, xm, gp, gm;
        xp.assign(point.begin(), point.end());
        xm.assign(point.begin(), point.end());
        gp.resize(point.size());
        gm.resize(point.size());
        for (int j = 0; j < n; ++j) {
            xp[j] = point[j] + h;
            xm[j] = point[j] - h;
            field_->eval(xp, gp);
            field_->eval(xm, gm);
            for (int i = 0; i < n; ++i) out(i, j) = (gp[i] - gm[i]) / (2.0 * h);
            xp[j] = point[j];
            xm[j] = point[j];
        }
    }
    if (!out.all_finite()) {
        throw EvalError("Jacobian has a non-finite entry at " + describe_point(point));
    }
}

SystemDef make_system(std::shared_ptr<const VectorField> field,
                      std::optional<double> ball_radius, std::string label,
                      JacobianMode mode, double fd_step, bool check_origin) {
    if (!field || field->dim() < 1) {
        throw Error("system requires dimension >= 1");
    }
    if (ball_radius && !(*ball_radius > 0.0 && std::isfinite(*ball_radius))) {
        throw Error("ball_radius must be a positive finite number or unbounded");
    }
    SystemDef sys;
    sys.field_ = std::move(field);
    sys.ball_radius_ = ball_radius;
    sys.label_ = std::move(label);
    sys.mode_ = mode;
    sys.fd_step_ = fd_step;

    if (check_origin) {
        const Vec origin(static_cast<std::size_t>(sys.dim()), 0.0);
        const Vec g0 = sys.eval(origin);
        const double r = norm2(g0);
        if (r > k_origin_tol) {
            throw Error("g(0) = " + describe_point(g0) + " is not the zero vector (||g(0)|| = " +
                        format_double(r) + " > 1e-10); translate the equilibrium first");
        }
        (void)sys.jacobian(origin); // probes finiteness at the origin
    }
    return sys;
}

SystemDef build_system(int n, const std::vector<std::string>& component_sources,
                       std::optional<double> ball_radius, std::string label,
                       JacobianMode mode, double fd_step) {
    if (n < 1) {
        throw Error("system dimension must be >= 1");
    }
    if (static_cast<int>(component_sources.size()) != n) {
        throw Error("expected " + std::to_string(n) + " component expressions, got " +
                    std::to_string(component_sources.size()));
    }
    std::vector<Expression> comps;
    comps.reserve(component_sources.size());
    for (int i = 0; i < n; ++i) {
        try {
            comps.push_back(Expression::parse(component_sources[i], n));
        } catch (const ParseError& e) {
            throw ParseError("component " + std::to_string(i + 1) + ": " + e.what(), e.offset());
        }
    }
    return make_system(std::make_shared<ExpressionField>(std::move(comps)), ball_radius,
                       std::move(label), mode, fd_step);
}

SystemDef translate_equilibrium(const SystemDef& sys, std::span<const double> x_star) {
    const int n = sys.dim();
    if (static_cast<int>(x_star.size()) != n) {
        throw Error("x_star dimension does not match the system");
    }
    Vec shift(x_star.begin(), x_star.end());
    double residual = norm2(sys.eval(shift));
    if (residual > k_equilibrium_pre_tol) {
        throw ConvergenceError("x_star is not an equilibrium: ||g(x_star)|| = " +
                               format_double(residual) + " > 1e-8");
    }
    // polish to the construction tolerance if the supplied point is coarse
    for (int it = 0; it < 20 && residual > k_origin_tol; ++it) {
        Matrix j = sys.jacobian(shift);
        Vec g = sys.eval(shift);
        for (double& v : g) v = -v;
        Vec delta = solve_linear(std::move(j), std::move(g));
        for (int i = 0; i < n; ++i) shift[i] += delta[i];
        residual = norm2(sys.eval(shift));
    }
    if (residual > k_origin_tol) {
        throw ConvergenceError("could not refine x_star to an equilibrium (residual " +
                               format_double(residual) + ")");
    }
    std::string label = sys.label().empty() ? "system" : sys.label();
    label += " shifted by " + describe_point(shift);
    return make_system(std::make_shared<ShiftedField>(sys.field(), std::move(shift)),
                       sys.ball_radius(), std::move(label), sys.jacobian_mode());
}

} // namespace lyapcert
