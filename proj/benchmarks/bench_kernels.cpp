#include <benchmark/benchmark.h>

#include "macf/frame.hpp"
#include "macf/matcore.hpp"
#include "macf/odekit.hpp"
#include "macf/sim.hpp"
#include "macf/spectra.hpp"
#include "macf/verify.hpp"

using namespace macf;

namespace {

void BM_f_cubic(benchmark::State& state) {
    Rng rng(1);
    const SquareMatrix a = random_matrix(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(f_cubic(a));
}
BENCHMARK(BM_f_cubic)->Arg(2)->Arg(3)->Arg(8);

void BM_linearized_H(benchmark::State& state) {
    Rng rng(2);
    const auto n = static_cast<std::size_t>(state.range(0));
    const SquareMatrix a = random_orthogonal(rng, n, 1), b = random_matrix(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(linearized_H(b, a));
}
BENCHMARK(BM_linearized_H)->Arg(2)->Arg(3)->Arg(8);

void BM_decompose(benchmark::State& state) {
    Rng rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    const SquareMatrix a = random_matrix(rng, n);
    const UnitVector u = random_unit(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(decompose(a, u));
}
BENCHMARK(BM_decompose)->Arg(3)->Arg(8);

// one semi-implicit step, n = 2, m = 2
void BM_step(benchmark::State& state) {
    RunConfig cfg;
    cfg.grid = static_cast<std::size_t>(state.range(0));
    cfg.epsilon = 0.03;
    const MatrixField f = init_well_prepared(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(step(f, cfg));
}
BENCHMARK(BM_step)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_eigen_smallest(benchmark::State& state) {
    const double eps = 1.0 / static_cast<double>(state.range(0));
    const auto op = IntervalOperator::standard(1, eps);
    for (auto _ : state) benchmark::DoNotOptimize(eigen_smallest(op, 2));
}
BENCHMARK(BM_eigen_smallest)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_solve_matrix(benchmark::State& state) {
    Rng rng(4);
    const auto prob = sample_problem(static_cast<std::size_t>(state.range(0)), rng,
                                     uniform_grid(kDefaultZ, kDefaultZPoints));
    for (auto _ : state) benchmark::DoNotOptimize(solve_matrix(prob.rhs));
}
BENCHMARK(BM_solve_matrix)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
