#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "lyapcert/criteria.hpp"
#include "lyapcert/hopfield.hpp"
#include "lyapcert/simulate.hpp"
#include "lyapcert/systemfile.hpp"

using namespace lyapcert;

namespace {

const SystemDef& builtin_system(const char* name) {
    static std::map<std::string, SystemDef> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        it = cache.emplace(name, instantiate(builtin_system_file(name)).system).first;
    }
    return it->second;
}

void BM_JacobianDual(benchmark::State& state) {
    const SystemDef& sys = builtin_system("example-2.2");
    const Vec p{1.3, -0.7};
    Matrix j(2, 2);
    for (auto _ : state) {
        sys.jacobian_into(p, j);
        benchmark::DoNotOptimize(j.a.data());
    }
}
BENCHMARK(BM_JacobianDual);

void BM_RayMatrix(benchmark::State& state) {
    const SystemDef& sys = builtin_system("example-2.2");
    const double radius = static_cast<double>(state.range(0));
    const Vec p{radius * 0.6, -radius * 0.8};
    for (auto _ : state) {
        RayMatrix d = ray_matrix(sys, p);
        benchmark::DoNotOptimize(d.entries.a.data());
    }
}
BENCHMARK(BM_RayMatrix)->Arg(1)->Arg(10)->Arg(100);

void BM_RayMatrixHopfield(benchmark::State& state) {
    const SystemDef& sys = builtin_system("hopfield-2");
    const Vec p{2.0, -3.0};
    for (auto _ : state) {
        RayMatrix d = ray_matrix(sys, p);
        benchmark::DoNotOptimize(d.entries.a.data());
    }
}
BENCHMARK(BM_RayMatrixHopfield);

void BM_BetaProfile(benchmark::State& state) {
    const SystemDef& sys = builtin_system("example-2.1");
    const Vec p{1.0, 1.0};
    for (auto _ : state) {
        BetaProfile b = beta_profile(sys, p);
        benchmark::DoNotOptimize(b.values.data());
    }
}
BENCHMARK(BM_BetaProfile);

void BM_JacobiEigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = -2.0 - i;
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = 0.3 / (1 + i + j);
            m(j, i) = m(i, j);
        }
    }
    for (auto _ : state) {
        auto eig = jacobi_eigenvalues(m);
        benchmark::DoNotOptimize(eig.data());
    }
}
BENCHMARK(BM_JacobiEigenvalues)->Arg(2)->Arg(4)->Arg(8);

void BM_IntegrateRkf45(benchmark::State& state) {
    const SystemDef& sys = builtin_system("hopfield-2");
    for (auto _ : state) {
        TrajectoryRecord rec = integrate(sys, Vec{1.0, -1.0}, 20.0);
        benchmark::DoNotOptimize(rec.terminal_norm);
    }
}
BENCHMARK(BM_IntegrateRkf45);

void BM_IntegrateRk4(benchmark::State& state) {
    const SystemDef& sys = builtin_system("hopfield-2");
    IntegratorConfig cfg;
    cfg.kind = IntegratorKind::rk4;
    for (auto _ : state) {
        TrajectoryRecord rec = integrate(sys, Vec{1.0, -1.0}, 20.0, cfg);
        benchmark::DoNotOptimize(rec.terminal_norm);
    }
}
BENCHMARK(BM_IntegrateRk4);

void BM_ClassifySmallPlan(benchmark::State& state) {
    const SystemDef& sys = builtin_system("example-2.1");
    SamplingPlan plan;
    plan.polar_radii = 16;
    plan.polar_directions = 32;
    for (auto _ : state) {
        StabilityVerdict v = classify(sys, plan);
        benchmark::DoNotOptimize(v.certified_radius);
    }
}
BENCHMARK(BM_ClassifySmallPlan);

} // namespace

BENCHMARK_MAIN();
