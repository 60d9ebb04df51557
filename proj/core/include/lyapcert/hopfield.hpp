#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyapcert/criteria.hpp"
#include "lyapcert/expr.hpp"
#include "lyapcert/system.hpp"

namespace lyapcert {

/// Neuron output nonlinearity. Exposes the value, its exact derivative, and
/// the ratio form value(x)/x whose singularity at 0 is removable (the shape
/// the ray integral of a tanh coupling takes).
class ActivationSpec {
public:
    enum class Kind { tanh_gain, linear, expression };

    static ActivationSpec tanh_gain(double gain);
    static ActivationSpec linear();
    /// Arbitrary single-variable expression in x1.
    static ActivationSpec expression(const std::string& text);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double gain() const noexcept { return gain_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    [[nodiscard]] double value(double x) const;
    [[nodiscard]] double derivative(double x) const;
    [[nodiscard]] double ratio(double x) const;

private:
    ActivationSpec() = default;

    Kind kind_ = Kind::linear;
    double gain_ = 1.0;
    std::vector<Expression> expr_; // singleton when kind is expression
    std::string text_;
};

/// tau_g(x) = tanh(g x)/x with tau_g(0) = g. Uses a short Taylor series for
/// |g x| < 1e-4 so the removable singularity is numerically removable too;
/// satisfies 0 < tau_g(x) <= g for every real x when g > 0.
double tanh_ratio(double gain, double x);

/// Additive continuous-time network x_i' = -a_i x_i + sum_j W_ij nu_j(x_j),
/// with biases folded into the activation argument (nu_j(x) = mu_j(x + theta_j)).
/// Activations are per unit (n entries, the standard form) or per edge
/// (n*n entries, row-major) for couplings that mix shapes.
struct HopfieldNetwork {
    int n = 0;
    Vec decay;                              // a_i, all positive
    Matrix weights;                         // W(i,j): from unit j into unit i
    Vec bias;                               // theta_j
    std::vector<ActivationSpec> activations;
    Vec external_input;                     // representable, but must be zero to compile
    std::optional<Vec> equilibrium;         // x*, found by Newton when absent
    std::string label;

    [[nodiscard]] bool per_edge() const noexcept {
        return static_cast<int>(activations.size()) == n * n;
    }
    [[nodiscard]] const ActivationSpec& activation(int i, int j) const {
        return per_edge() ? activations[static_cast<std::size_t>(i) * n + j]
                          : activations[static_cast<std::size_t>(j)];
    }
    void validate() const;
};

/// Damped Newton iteration on A x + h(x) = 0 with the analytic Jacobian.
/// Returns x* with residual <= 1e-10 within 100 iterations.
Vec find_equilibrium(const HopfieldNetwork& net, std::span<const double> guess);

/// Compiles to the shifted system g_hat(y) = A(y + x*) + h(y + x*) with
/// g_hat(0) = 0 and an unbounded analysis ball. The compiled Jacobian uses
/// the activations' analytic derivatives.
SystemDef compile(const HopfieldNetwork& net);

struct Theorem5Profile {
    BetaProfile profile;
    Vec decay_term;    // -a_i contribution per component
    Vec coupling_diag; // f_ii = d_ii + a_i per component
};

/// Beta bounds of the compiled network, with the decay / coupling split kept
/// visible for reporting.
Theorem5Profile theorem5_betas(const HopfieldNetwork& net, std::span<const double> point,
                               const QuadratureOptions& quad = {});
Theorem5Profile theorem5_betas(const HopfieldNetwork& net, const SystemDef& compiled,
                               std::span<const double> point,
                               const QuadratureOptions& quad = {});

} // namespace lyapcert
