#include <cmath>
#include <random>

#include "doctest.h"
#include "lyapcert/hopfield.hpp"
#include "lyapcert/ray.hpp"
#include "lyapcert/systemfile.hpp"
#include "support/oracles.hpp"

using namespace lyapcert;

TEST_CASE("ray matrix reproduces the factored forms") {
    const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));

    // at (0,3): d12 integrates 2 s x2 over the ray, giving x2 = 3
    const RayMatrix r = ray_matrix(ex21.system, Vec{0.0, 3.0});
    CHECK(r.entries(0, 0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(r.entries(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.entries(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.entries(1, 1) == doctest::Approx(-2.0).epsilon(1e-12));

    // the factored matrix is [[-2, x2], [x1, -2]]
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const Vec p = oracles::random_ball_point(rng, 2, 2.8);
        const RayMatrix d = ray_matrix(ex21.system, p);
        CHECK(d.entries(0, 1) == doctest::Approx(p[1]).epsilon(1e-10));
        CHECK(d.entries(1, 0) == doctest::Approx(p[0]).epsilon(1e-10));
    }

    // second system: diagonal entries -4 + sech(x1) and -6 - cos(x2)
    const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
    const RayMatrix s = ray_matrix(ex22.system, Vec{1.0, 0.0});
    const double sech1 = 1.0 / std::cosh(1.0);
    CHECK(s.entries(0, 0) == doctest::Approx(-4.0 + sech1).epsilon(1e-11));
    CHECK(s.entries(0, 0) == doctest::Approx(-3.3519457263).epsilon(1e-9));
    CHECK(s.entries(0, 1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(s.entries(1, 0) == doctest::Approx(-1.0).epsilon(1e-12));

    const RayMatrix s2 = ray_matrix(ex22.system, Vec{0.0, 2.0});
    CHECK(s2.entries(1, 1) == doctest::Approx(-6.0 - std::cos(2.0)).epsilon(1e-11));
}

TEST_CASE("linear fields have a constant ray matrix") {
    const SystemDef lin = build_system(2, {"-3*x1 + x2", "2*x1 - 5*x2"}, std::nullopt);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const Vec p = oracles::random_ball_point(rng, 2, 50.0);
        const RayMatrix d = ray_matrix(lin, p);
        CHECK(d.entries(0, 0) == doctest::Approx(-3.0).epsilon(1e-12));
        CHECK(d.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.entries(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(d.entries(1, 1) == doctest::Approx(-5.0).epsilon(1e-12));
    }
}

TEST_CASE("at the origin the ray matrix is exactly the Jacobian") {
    const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
    const RayMatrix d0 = ray_matrix(ex22.system, Vec{0.0, 0.0});
    const Matrix j0 = ex22.system.jacobian(Vec{0.0, 0.0});
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 2; ++c) CHECK(d0.entries(i, c) == j0(i, c)); // bitwise
    CHECK(d0.est_error == 0.0);
}

TEST_CASE("reconstruction identity holds at 1000 random points per builtin") {
    std::mt19937_64 rng(20260810);
    for (const char* name : {"example-2.1", "example-2.2", "hopfield-2"}) {
        const LoadedSystem loaded = instantiate(builtin_system_file(name));
        const double radius = loaded.system.ball_radius().value_or(10.0);
        int failures = 0;
        for (int k = 0; k < 1000; ++k) {
            const Vec p = oracles::random_ball_point(rng, loaded.system.dim(), radius);
            const RayMatrix d = ray_matrix(loaded.system, p);
            const Vec g = loaded.system.eval(p);
            if (d.est_error > 1e-8 * (1.0 + oracles::vec_norm(g))) ++failures;
        }
        CAPTURE(name);
        CHECK(failures == 0);
    }
}

TEST_CASE("single 4-node panel is exact for low-degree polynomial fields") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        // random polynomial field of total degree <= 7 with g(0) = 0
        auto poly = [&](int deg) {
            std::string s = lyapcert::format_double(coef(rng)) + "*x1";
            s += " + " + lyapcert::format_double(coef(rng)) + "*x2^" + std::to_string(deg);
            s += " + " + lyapcert::format_double(coef(rng)) + "*x1^3*x2^2";
            return s;
        };
        const SystemDef sys =
            build_system(2, {poly(7), poly(6)}, std::nullopt);
        const Vec p = oracles::random_ball_point(rng, 2, 2.0);
        const Matrix one_panel = ray_matrix_single_panel(sys, p);
        const RayMatrix adaptive = ray_matrix(sys, p);
        for (int i = 0; i < 2; ++i) {
            for (int c = 0; c < 2; ++c) {
                CHECK(std::fabs(one_panel(i, c) - adaptive.entries(i, c)) <= 1e-13);
            }
        }
    }
}

TEST_CASE("hopfield coincidence: quadrature matches the closed-form coupling") {
    const LoadedSystem hop = instantiate(builtin_system_file("hopfield-2"));
    for (int iy = 0; iy <= 10; ++iy) {
        for (int ix = 0; ix <= 10; ++ix) {
            const double x = -5.0 + ix;
            const double y = -5.0 + iy;
            const RayMatrix d = ray_matrix(hop.system, Vec{x, y});
            const double f11 = -3.0 - tanh_ratio(3.0, x);
            const double f22 = -1.0 + tanh_ratio(3.0, y) / 5.0;
            CHECK(d.entries(0, 0) == doctest::Approx(-10.0 + f11).epsilon(1e-9));
            CHECK(d.entries(1, 1) == doctest::Approx(-10.0 + f22).epsilon(1e-9));
            CHECK(d.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(d.entries(1, 0) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("decoupled rows sum back to the field") {
    const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));

    const RayMatrix d = ray_matrix(ex21.system, Vec{1.0, 1.0});
    const RowDecomposition row0 = decoupled_row(d, 0);
    CHECK(row0.diag_term == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(row0.offdiag_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row0.diag_term + row0.offdiag_sum == doctest::Approx(-1.0).epsilon(1e-11));

    const RayMatrix d0 = ray_matrix(ex21.system, Vec{0.0, 0.0});
    const RowDecomposition zero = decoupled_row(d0, 0);
    CHECK(zero.diag_term == 0.0);
    CHECK(zero.offdiag_sum == 0.0);

    const SystemDef lin = build_system(1, {"-x1"}, std::nullopt);
    const RayMatrix dl = ray_matrix(lin, Vec{3.0});
    const RowDecomposition lrow = decoupled_row(dl, 0);
    CHECK(lrow.diag_term == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(lrow.offdiag_sum == 0.0);

    CHECK_THROWS_AS((void)decoupled_row(d, 5), Error);
}

TEST_CASE("quadrature rejects bad tolerances and reports node counts") {
    const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));
    CHECK_THROWS_AS((void)ray_matrix(ex21.system, Vec{1.0, 1.0}, {.tol = 0.0}), Error);
    const RayMatrix d = ray_matrix(ex21.system, Vec{1.0, 1.0});
    CHECK(d.node_count >= 12); // whole panel plus two refinement halves
}

TEST_CASE("an exhausted panel depth budget is an error, not a wrong answer") {
    const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
    QuadratureOptions starved;
    starved.tol = 1e-30;
    starved.max_depth = 1;
    CHECK_THROWS_AS((void)ray_matrix(ex22.system, Vec{3.0, 1.0}, starved), QuadratureError);
}
