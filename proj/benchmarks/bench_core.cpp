#include "fecvx/adaptivity.hpp"

#include <benchmark/benchmark.h>

using namespace fecvx;

static void BM_HessianAssembly(benchmark::State& state) {
    const Mesh mesh = structured_mesh(Pattern::crisscross, static_cast<int>(state.range(0)));
    const FESpace space = build_trial_space(mesh, 2);
    const TestBasis basis = build_test_basis(mesh);
    for (auto _ : state) {
        auto forms = assemble(space, basis, true);
        benchmark::DoNotOptimize(forms);
    }
    state.SetItemsProcessed(state.iterations() * basis.size());
}
BENCHMARK(BM_HessianAssembly)->Arg(4)->Arg(8)->Arg(16);

static void BM_Estimator(benchmark::State& state) {
    const Mesh mesh = structured_mesh(Pattern::crisscross, static_cast<int>(state.range(0)));
    const FESpace space = build_trial_space(mesh, 2);
    const Eigen::VectorXd coeffs =
        interpolate(space, [](const Vec2& x) { return x.squaredNorm(); });
    for (auto _ : state) {
        auto ind = estimate(mesh, space, coeffs);
        benchmark::DoNotOptimize(ind);
    }
    state.SetItemsProcessed(state.iterations() * mesh.num_elements());
}
BENCHMARK(BM_Estimator)->Arg(8)->Arg(16)->Arg(32);

static void BM_MonopolistSolve(benchmark::State& state) {
    const BenchmarkProblem prob = monopolist(0.0);
    LoopConfig cfg;
    cfg.iterations = 1;
    cfg.degree = 2;
    for (auto _ : state) {
        auto run = run_loop(prob, cfg);
        benchmark::DoNotOptimize(run);
    }
}
BENCHMARK(BM_MonopolistSolve)->Unit(benchmark::kMillisecond);

static void BM_UniformBisection(benchmark::State& state) {
    const Mesh mesh = structured_mesh(Pattern::diagonal, 16);
    for (auto _ : state) {
        Mesh refined = bisect_all(mesh);
        benchmark::DoNotOptimize(refined);
    }
}
BENCHMARK(BM_UniformBisection);

BENCHMARK_MAIN();
