#include "lyapcert/hopfield.hpp"

#include <cmath>

namespace lyapcert {

ActivationSpec ActivationSpec::tanh_gain(double gain) {
    ActivationSpec a;
    a.kind_ = Kind::tanh_gain;
    a.gain_ = gain;
    return a;
}

ActivationSpec ActivationSpec::linear() {
    ActivationSpec a;
    a.kind_ = Kind::linear;
    return a;
}

ActivationSpec ActivationSpec::expression(const std::string& text) {
    ActivationSpec a;
    a.kind_ = Kind::expression;
    a.expr_.push_back(Expression::parse(text, 1));
    a.text_ = text;
    return a;
}

double ActivationSpec::value(double x) const {
    switch (kind_) {
        case Kind::tanh_gain: return std::tanh(gain_ * x);
        case Kind::linear: return x;
        case Kind::expression: return expr_.front().eval(std::span<const double>(&x, 1));
    }
    return 0.0;
}

double ActivationSpec::derivative(double x) const {
    switch (kind_) {
        case Kind::tanh_gain: {
            const double t = std::tanh(gain_ * x);
            return gain_ * (1.0 - t * t);
        }
        case Kind::linear: return 1.0;
        case Kind::expression:
            return expr_.front().eval_dual(std::span<const double>(&x, 1), 1).der;
    }
    return 0.0;
}

double ActivationSpec::ratio(double x) const {
    switch (kind_) {
        case Kind::tanh_gain: return tanh_ratio(gain_, x);
        case Kind::linear: return 1.0;
        case Kind::expression:
            // only meaningful when value(0) = 0; near 0 the ratio limits to
            // the derivative there
            if (std::fabs(x) < 1e-8) return derivative(0.0);
            return value(x) / x;
    }
    return 0.0;
}

double tanh_ratio(double gain, double x) {
    const double z = gain * x;
    if (std::fabs(z) < 1e-4) {
        const double g3 = gain * gain * gain;
        const double g5 = g3 * gain * gain;
        const double x2 = x * x;
        return gain - g3 * x2 / 3.0 + 2.0 * g5 * x2 * x2 / 15.0;
    }
    return std::tanh(z) / x;
}

void HopfieldNetwork::validate() const {
    if (n < 1) {
        throw Error("network needs at least one unit");
    }
    if (static_cast<int>(decay.size()) != n) {
        throw Error("decay vector must have n entries");
    }
    for (int i = 0; i < n; ++i) {
        if (!(decay[i] > 0.0) || !std::isfinite(decay[i])) {
            throw Error("decay rate a" + std::to_string(i + 1) + " must be positive");
        }
    }
    if (weights.rows != n || weights.cols != n || !weights.all_finite()) {
        throw Error("weight matrix must be n x n and finite");
    }
    if (static_cast<int>(bias.size()) != n) {
        throw Error("bias vector must have n entries");
    }
    const auto acts = static_cast<int>(activations.size());
    if (acts != n && acts != n * n) {
        throw Error("activations must have n (per unit) or n*n (per edge) entries");
    }
    if (!external_input.empty() && static_cast<int>(external_input.size()) != n) {
        throw Error("external input vector must have n entries");
    }
    if (equilibrium && static_cast<int>(equilibrium->size()) != n) {
        throw Error("x_star must have n entries");
    }
}

namespace {

/// Compiled right-hand side g_hat(y) = A(y + x*) + h(y + x*).
class HopfieldField final : public VectorField {
public:
    HopfieldField(HopfieldNetwork net, Vec x_star)
        : net_(std::move(net)), x_star_(std::move(x_star)) {}

    [[nodiscard]] int dim() const noexcept override { return net_.n; }

    void eval(std::span<const double> y, std::span<double> out) const override {
        const int n = net_.n;
        for (int i = 0; i < n; ++i) {
            double s = -net_.decay[i] * (y[i] + x_star_[i]);
            for (int j = 0; j < n; ++j) {
                const double w = net_.weights(i, j);
                if (w == 0.0) continue;
                s += w * net_.activation(i, j).value(y[j] + x_star_[j] + net_.bias[j]);
            }
            out[i] = s;
        }
    }

    void jacobian(std::span<const double> y, Matrix& out) const override {
        const int n = net_.n;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double v = i == j ? -net_.decay[i] : 0.0;
                const double w = net_.weights(i, j);
                if (w != 0.0) {
                    v += w * net_.activation(i, j).derivative(y[j] + x_star_[j] + net_.bias[j]);
                }
                out(i, j) = v;
            }
        }
    }

    [[nodiscard]] const HopfieldNetwork& net() const noexcept { return net_; }

private:
    HopfieldNetwork net_;
    Vec x_star_;
};

std::string describe_point(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += format_double(x[i]);
    }
    return s + ")";
}

} // namespace

Vec find_equilibrium(const HopfieldNetwork& net, std::span<const double> guess) {
    net.validate();
    if (static_cast<int>(guess.size()) != net.n) {
        throw Error("guess dimension does not match the network");
    }
    for (double v : guess) {
        if (!std::isfinite(v)) throw Error("guess must be finite");
    }

    // evaluate the unshifted field A x + h(x) and its Jacobian
    HopfieldField raw(net, Vec(static_cast<std::size_t>(net.n), 0.0));
    const int n = net.n;
    Vec x(guess.begin(), guess.end());
    Vec f(static_cast<std::size_t>(n));
    Matrix jac(n, n);

    raw.eval(x, f);
    double residual = norm2(f);
    for (int it = 0; it < 100; ++it) {
        if (residual <= 1e-10) return x;
        raw.jacobian(x, jac);
        Vec rhs(f);
        for (double& v : rhs) v = -v;
        Vec delta;
        try {
            delta = solve_linear(jac, std::move(rhs));
        } catch (const ConvergenceError&) {
            throw ConvergenceError("singular Jacobian at Newton iterate " + describe_point(x));
        }
        // damp by halving until the residual actually decreases
        double lambda = 1.0;
        Vec x_new(static_cast<std::size_t>(n));
        Vec f_new(static_cast<std::size_t>(n));
        while (true) {
            for (int i = 0; i < n; ++i) x_new[i] = x[i] + lambda * delta[i];
            raw.eval(x_new, f_new);
            const double r_new = norm2(f_new);
            if (r_new < residual || lambda < 1e-12) {
                x = x_new;
                f = f_new;
                residual = r_new;
                break;
            }
            lambda *= 0.5;
        }
    }
    if (residual <= 1e-10) return x;
    throw ConvergenceError("equilibrium search did not converge in 100 iterations (residual " +
                           format_double(residual) + ")");
}

SystemDef compile(const HopfieldNetwork& net) {
    net.validate();
    for (double v : net.external_input) {
        if (v != 0.0) {
            throw Error("nonzero external inputs are not supported: only the autonomous "
                        "form (all I_i = 0) can be compiled");
        }
    }

    Vec x_star;
    if (net.equilibrium) {
        x_star = *net.equilibrium;
        HopfieldField raw(net, Vec(static_cast<std::size_t>(net.n), 0.0));
        Vec f(static_cast<std::size_t>(net.n));
        raw.eval(x_star, f);
        const double residual = norm2(f);
        if (residual > 1e-8) {
            throw Error("supplied x_star has equilibrium residual " + format_double(residual) +
                        " > 1e-8");
        }
        if (residual > 1e-10) {
            x_star = find_equilibrium(net, x_star);
        }
    } else {
        x_star = find_equilibrium(net, Vec(static_cast<std::size_t>(net.n), 0.0));
    }

    std::string label =
        net.label.empty() ? "hopfield(n=" + std::to_string(net.n) + ")" : net.label;
    return make_system(std::make_shared<HopfieldField>(net, std::move(x_star)), std::nullopt,
                       std::move(label), JacobianMode::dual);
}

Theorem5Profile theorem5_betas(const HopfieldNetwork& net, const SystemDef& compiled,
                               std::span<const double> point, const QuadratureOptions& quad) {
    RayMatrix ray = ray_matrix(compiled, point, quad);
    Theorem5Profile t5;
    t5.profile.values = beta_from_matrix(ray.entries, BetaVariant::theorem2);
    t5.profile.variant = BetaVariant::theorem2;
    t5.profile.est_error = ray.est_error;
    t5.profile.node_count = ray.node_count;
    t5.decay_term.resize(static_cast<std::size_t>(net.n));
    t5.coupling_diag.resize(static_cast<std::size_t>(net.n));
    for (int i = 0; i < net.n; ++i) {
        t5.decay_term[i] = -net.decay[i];
        t5.coupling_diag[i] = ray.entries(i, i) + net.decay[i];
    }
    t5.profile.point = std::move(ray.point);
    return t5;
}

Theorem5Profile theorem5_betas(const HopfieldNetwork& net, std::span<const double> point,
                               const QuadratureOptions& quad) {
    return theorem5_betas(net, compile(net), point, quad);
}

} // namespace lyapcert
