#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyapcert/expr.hpp"
#include "lyapcert/linalg.hpp"

namespace lyapcert {

enum class JacobianMode { dual, finite_difference };

/// Right-hand side of an autonomous system x'(t) = g(x). Implementations are
/// immutable and pure; the jacobian route is exact (dual numbers or analytic
/// derivatives), finite differencing is layered on top by SystemDef.
class VectorField {
public:
    virtual ~VectorField() = default;
    [[nodiscard]] virtual int dim() const noexcept = 0;
    virtual void eval(std::span<const double> x, std::span<double> out) const = 0;
    virtual void jacobian(std::span<const double> x, Matrix& out) const = 0;
};

/// g given as n parsed expressions over x1..xn.
class ExpressionField final : public VectorField {
public:
    explicit ExpressionField(std::vector<Expression> components);
    [[nodiscard]] int dim() const noexcept override {
        return static_cast<int>(components_.size());
    }
    void eval(std::span<const double> x, std::span<double> out) const override;
    void jacobian(std::span<const double> x, Matrix& out) const override;
    [[nodiscard]] const std::vector<Expression>& components() const noexcept {
        return components_;
    }

private:
    std::vector<Expression> components_;
};

/// g_hat(y) = g(y + shift); used to move an equilibrium to the origin.
class ShiftedField final : public VectorField {
public:
    ShiftedField(std::shared_ptr<const VectorField> base, Vec shift);
    [[nodiscard]] int dim() const noexcept override { return base_->dim(); }
    void eval(std::span<const double> x, std::span<double> out) const override;
    void jacobian(std::span<const double> x, Matrix& out) const override;

private:
    std::shared_ptr<const VectorField> base_;
    Vec shift_;
};

/// A validated autonomous system with g(0) = 0, a declared analysis ball
/// (nullopt = unbounded), and a Jacobian evaluation mode. Immutable; all
/// evaluators are pure.
class SystemDef {
public:
    [[nodiscard]] int dim() const noexcept { return field_->dim(); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::optional<double> ball_radius() const noexcept { return ball_radius_; }
    [[nodiscard]] JacobianMode jacobian_mode() const noexcept { return mode_; }
    [[nodiscard]] const std::shared_ptr<const VectorField>& field() const noexcept {
        return field_;
    }

    [[nodiscard]] Vec eval(std::span<const double> point) const;
    /// Allocation-free variant for hot loops; checks finiteness.
    void eval_into(std::span<const double> point, std::span<double> out) const;

    /// Entry (i,j) is dg_i/dx_j at the point; route per jacobian_mode.
    /// Every entry is checked finite.
    [[nodiscard]] Matrix jacobian(std::span<const double> point) const;
    void jacobian_into(std::span<const double> point, Matrix& out) const;

    friend SystemDef make_system(std::shared_ptr<const VectorField> field,
                                 std::optional<double> ball_radius, std::string label,
                                 JacobianMode mode, double fd_step, bool check_origin);

private:
    SystemDef() = default;

    std::shared_ptr<const VectorField> field_;
    std::optional<double> ball_radius_;
    std::string label_;
    JacobianMode mode_ = JacobianMode::dual;
    double fd_step_ = 1e-6;
};

/// Wraps a field into a SystemDef. check_origin enforces ||g(0)|| <= 1e-10
/// and probes the Jacobian at 0 for finiteness.
SystemDef make_system(std::shared_ptr<const VectorField> field,
                      std::optional<double> ball_radius, std::string label,
                      JacobianMode mode = JacobianMode::dual, double fd_step = 1e-6,
                      bool check_origin = true);

/// Parses the component sources over x1..xn and builds a validated system.
/// ball_radius nullopt declares the unbounded domain (global analyses).
SystemDef build_system(int n, const std::vector<std::string>& component_sources,
                       std::optional<double> ball_radius, std::string label = {},
                       JacobianMode mode = JacobianMode::dual, double fd_step = 1e-6);

/// Returns g_hat(y) = g(y + x_star) with the equilibrium moved to the origin.
/// Requires ||g(x_star)|| <= 1e-8; residuals above the construction tolerance
/// 1e-10 are polished away with a few Newton steps first.
SystemDef translate_equilibrium(const SystemDef& sys, std::span<const double> x_star);

} // namespace lyapcert
