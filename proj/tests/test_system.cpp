#include <cmath>
#include <random>

#include "doctest.h"
#include "lyapcert/system.hpp"
#include "lyapcert/systemfile.hpp"
#include "support/oracles.hpp"

using namespace lyapcert;

namespace {

SystemDef example_21() {
    return build_system(2, {"-2*x1 + x2^2", "x1^2 - 2*x2"}, std::sqrt(8.0), "example-2.1");
}

SystemDef example_22() {
    return build_system(2, {"-4*x1 + x1*sech(x1) + 4*x2", "-x1 - 6*x2 - x2*cos(x2)"},
                        std::nullopt, "example-2.2");
}

} // namespace

TEST_CASE("build_system validates its contract") {
    const SystemDef s21 = example_21();
    CHECK(s21.dim() == 2);
    CHECK(s21.ball_radius() == doctest::Approx(std::sqrt(8.0)));

    const SystemDef linear = build_system(1, {"-x1"}, std::nullopt);
    CHECK(linear.dim() == 1);
    CHECK_FALSE(linear.ball_radius().has_value());

    // zero-solution assumption is enforced at construction
    CHECK_THROWS_WITH_AS(
        (void)build_system(2, {"x1 + 1", "x2"}, std::nullopt),
        doctest::Contains("g(0)"), Error);
    // wrong arity and bad sources are rejected
    CHECK_THROWS_AS((void)build_system(2, {"x1"}, std::nullopt), Error);
    CHECK_THROWS_AS((void)build_system(2, {"x1", "x3"}, std::nullopt), ParseError);
    CHECK_THROWS_AS((void)build_system(0, {}, std::nullopt), Error);
}

TEST_CASE("jacobian entries") {
    const SystemDef s21 = example_21();
    const Matrix j = s21.jacobian(Vec{1.0, 1.0});
    CHECK(j(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(j(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(j(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(j(1, 1) == doctest::Approx(-2.0).epsilon(1e-15));

    // linear system: constant in the point
    const SystemDef lin = build_system(2, {"-3*x1 + x2", "x1 - 2*x2"}, std::nullopt);
    const Matrix j0 = lin.jacobian(Vec{0.0, 0.0});
    const Matrix j7 = lin.jacobian(Vec{7.0, -4.0});
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 2; ++c) CHECK(j0(i, c) == doctest::Approx(j7(i, c)).epsilon(1e-15));

    // d/dx1 of -4 x1 + x1 sech(x1) + 4 x2 at 0 is -4 + sech(0) = -3
    const SystemDef s22 = example_22();
    CHECK(s22.jacobian(Vec{0.0, 0.0})(0, 0) == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("dual and finite-difference jacobians agree") {
    std::mt19937_64 rng(42);
    for (const char* name : {"example-2.1", "example-2.2", "hopfield-2"}) {
        const LoadedSystem loaded = instantiate(builtin_system_file(name));
        const SystemDef& sys = loaded.system;
        const double radius = sys.ball_radius().value_or(10.0);

        // same field, finite-difference mode
        const SystemDef fd = make_system(sys.field(), sys.ball_radius(), sys.label(),
                                         JacobianMode::finite_difference);
        for (int k = 0; k < 1000; ++k) {
            const Vec p = oracles::random_ball_point(rng, sys.dim(), radius);
            const Matrix a = sys.jacobian(p);
            const Matrix b = fd.jacobian(p);
            for (int i = 0; i < sys.dim(); ++i) {
                for (int c = 0; c < sys.dim(); ++c) {
                    CHECK(std::fabs(a(i, c) - b(i, c)) <=
                          1e-5 + 1e-5 * std::fabs(a(i, c)));
                }
            }
        }
    }
}

TEST_CASE("translate_equilibrium") {
    const SystemDef lin = build_system(1, {"-x1"}, std::nullopt);
    const SystemDef same = translate_equilibrium(lin, Vec{0.0});
    CHECK(same.eval(Vec{2.0})[0] == doctest::Approx(-2.0).epsilon(1e-15));

    // x* = (2,2) is a genuine equilibrium of the first example system
    const SystemDef s21 = example_21();
    CHECK(norm2(s21.eval(Vec{2.0, 2.0})) == 0.0);
    const SystemDef shifted = translate_equilibrium(s21, Vec{2.0, 2.0});
    CHECK(norm2(shifted.eval(Vec{0.0, 0.0})) <= 1e-10);
    // shifted field evaluates the original off the new origin
    const Vec g = shifted.eval(Vec{-1.0, -1.0});
    const Vec expected = s21.eval(Vec{1.0, 1.0});
    CHECK(g[0] == doctest::Approx(expected[0]).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(expected[1]).epsilon(1e-15));

    // a far-from-equilibrium shift is rejected
    CHECK_THROWS_AS((void)translate_equilibrium(s21, Vec{1.0, 1.0}), ConvergenceError);

    // a coarse equilibrium guess within 1e-8 is polished to 1e-10
    const SystemDef polished = translate_equilibrium(s21, Vec{2.0 + 1e-9, 2.0});
    CHECK(norm2(polished.eval(Vec{0.0, 0.0})) <= 1e-10);
}

TEST_CASE("evaluation failures are reported with context") {
    const SystemDef sys = build_system(1, {"x1^2"}, std::nullopt);
    CHECK_THROWS_AS((void)sys.eval(Vec{1e200}), EvalError);       // overflow -> non-finite
    CHECK_THROWS_AS((void)sys.eval(Vec{1.0, 2.0}), EvalError);    // dimension mismatch
    CHECK_THROWS_AS((void)sys.jacobian(Vec{1.0, 2.0}), EvalError);
}
