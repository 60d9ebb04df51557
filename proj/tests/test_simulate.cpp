#include <cmath>

#include "doctest.h"
#include "lyapcert/simulate.hpp"
#include "lyapcert/systemfile.hpp"
#include "support/oracles.hpp"

using namespace lyapcert;

namespace {

IntegratorConfig rk4_config(double dt = 1e-3) {
    IntegratorConfig c;
    c.kind = IntegratorKind::rk4;
    c.dt = dt;
    return c;
}

} // namespace

TEST_CASE("linear decay hits the closed form") {
    const SystemDef lin = build_system(1, {"-x1"}, std::nullopt);
    const double exact = std::exp(-1.0);

    const TrajectoryRecord rk4 = integrate(lin, Vec{1.0}, 1.0, rk4_config());
    CHECK(rk4.status == TrajectoryStatus::completed);
    CHECK(std::fabs(rk4.states.back()[0] - exact) <= 1e-8);

    const TrajectoryRecord rkf = integrate(lin, Vec{1.0}, 1.0);
    CHECK(std::fabs(rkf.states.back()[0] - exact) <= 1e-8);
}

TEST_CASE("rk4 order: halving dt cuts the error by about 16") {
    const SystemDef lin = build_system(1, {"-x1"}, std::nullopt);
    const double exact = std::exp(-1.0);
    const double err_coarse =
        std::fabs(integrate(lin, Vec{1.0}, 1.0, rk4_config(0.1)).states.back()[0] - exact);
    const double err_fine =
        std::fabs(integrate(lin, Vec{1.0}, 1.0, rk4_config(0.05)).states.back()[0] - exact);
    const double factor = err_coarse / err_fine;
    CHECK(factor >= 8.0);
    CHECK(factor <= 32.0);
}

TEST_CASE("trajectories inside the certified regions reach the origin") {
    const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
    const TrajectoryRecord t22 = integrate(ex22.system, Vec{1.0, 1.0}, 20.0);
    CHECK(t22.status == TrajectoryStatus::completed);
    CHECK(t22.terminal_norm <= 1e-6);
    // independent fine-step oracle agrees
    const Vec oracle = oracles::reference_rk4(ex22.system, {1.0, 1.0}, 20.0, 1e-4);
    CHECK(oracles::vec_norm(oracle) <= 1e-6);

    const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));
    const TrajectoryRecord t21 = integrate(ex21.system, Vec{1.8, 1.8}, 20.0);
    CHECK(t21.terminal_norm <= 1e-6);
    const Vec oracle21 = oracles::reference_rk4(ex21.system, {1.8, 1.8}, 20.0, 1e-4);
    CHECK(oracles::vec_norm(oracle21) <= 1e-6);
}

TEST_CASE("(2,2) is a second equilibrium of the first example, not a convergent start") {
    // the sphere ||x|| = sqrt(8) carries this fixed point; the certified
    // region is the open ball, so convergence is only claimed strictly inside
    const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));
    CHECK(norm2(ex21.system.eval(Vec{2.0, 2.0})) == 0.0);
    const TrajectoryRecord rec = integrate(ex21.system, Vec{2.0, 2.0}, 5.0);
    CHECK(rec.terminal_norm == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
}

TEST_CASE("records are well-formed") {
    const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
    const TrajectoryRecord rec = integrate(ex22.system, Vec{0.5, -0.5}, 2.0);
    REQUIRE(rec.times.size() == rec.states.size());
    REQUIRE(rec.times.size() == rec.v_values.size());
    for (std::size_t k = 1; k < rec.times.size(); ++k) {
        CHECK(rec.times[k] > rec.times[k - 1]);
    }
    for (const Vec& x : rec.states) {
        for (double v : x) CHECK(std::isfinite(v));
    }
    CHECK(rec.times.back() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rec.v_values[0] == doctest::Approx(0.25));
}

TEST_CASE("v is monotone along certified trajectories") {
    const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
    for (IntegratorKind kind : {IntegratorKind::rk4, IntegratorKind::rkf45}) {
        IntegratorConfig cfg;
        cfg.kind = kind;
        const TrajectoryRecord rec = integrate(ex22.system, Vec{2.0, -1.5}, 10.0, cfg);
        for (std::size_t k = 1; k < rec.v_values.size(); ++k) {
            CHECK(rec.v_values[k] <= rec.v_values[k - 1] + 1e-9);
        }
    }
}

TEST_CASE("rk4 and rkf45 agree on the builtins at t = 10") {
    for (const char* name : {"example-2.1", "example-2.2", "hopfield-2"}) {
        const LoadedSystem loaded = instantiate(builtin_system_file(name));
        const Vec x0{0.9, -1.1};
        const TrajectoryRecord a = integrate(loaded.system, x0, 10.0, rk4_config());
        const TrajectoryRecord b = integrate(loaded.system, x0, 10.0);
        REQUIRE(a.status == TrajectoryStatus::completed);
        REQUIRE(b.status == TrajectoryStatus::completed);
        double diff = 0.0;
        for (int i = 0; i < 2; ++i) {
            diff = std::max(diff, std::fabs(a.states.back()[i] - b.states.back()[i]));
        }
        CAPTURE(name);
        CHECK(diff <= 1e-6);
    }
}

TEST_CASE("divergence truncates with a flag instead of throwing") {
    const SystemDef bomb = build_system(1, {"x1^2"}, std::nullopt);
    const TrajectoryRecord rec = integrate(bomb, Vec{1.0}, 5.0, rk4_config(1e-3));
    CHECK(rec.status == TrajectoryStatus::diverged);
    CHECK(rec.times.back() < 5.0);
    for (const Vec& x : rec.states) {
        CHECK(std::isfinite(x[0]));
    }

    const TrajectoryRecord adaptive = integrate(bomb, Vec{1.0}, 5.0);
    CHECK(adaptive.status == TrajectoryStatus::diverged);
}

TEST_CASE("argument validation") {
    const SystemDef lin = build_system(1, {"-x1"}, std::nullopt);
    CHECK_THROWS_AS((void)integrate(lin, Vec{1.0}, -1.0), Error);
    CHECK_THROWS_AS((void)integrate(lin, Vec{1.0, 2.0}, 1.0), Error);
    IntegratorConfig bad = rk4_config(0.0);
    CHECK_THROWS_AS((void)integrate(lin, Vec{1.0}, 1.0, bad), Error);
}

TEST_CASE("convergence experiments") {
    SUBCASE("the globally stable example converges from radius 5") {
        const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
        const ExperimentSummary s = convergence_experiment(ex22.system, 5.0, 100, 20.0, 1);
        CHECK(s.count == 100);
        CHECK(s.converged == 100);
        CHECK(s.diverged == 0);
        CHECK(s.v_violations == 0);
        CHECK(s.max_terminal_norm < 1e-6);
    }

    SUBCASE("the certified ball of the first example converges") {
        const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));
        const ExperimentSummary s = convergence_experiment(ex21.system, 2.8, 100, 20.0, 2);
        CHECK(s.converged == 100);
    }

    SUBCASE("radius zero is the trivial constant trajectory") {
        const LoadedSystem ex21 = instantiate(builtin_system_file("example-2.1"));
        const ExperimentSummary s = convergence_experiment(ex21.system, 0.0, 3, 1.0, 3);
        CHECK(s.converged == 3);
        CHECK(s.max_terminal_norm == 0.0);
        CHECK(s.v_violations == 0);
    }

    SUBCASE("determinism in the seed") {
        const LoadedSystem ex22 = instantiate(builtin_system_file("example-2.2"));
        const ExperimentSummary a = convergence_experiment(ex22.system, 5.0, 10, 5.0, 42);
        const ExperimentSummary b = convergence_experiment(ex22.system, 5.0, 10, 5.0, 42);
        CHECK(a.max_terminal_norm == b.max_terminal_norm);
    }
}
