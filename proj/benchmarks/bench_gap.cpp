#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gapeq/critical.hpp"
#include "gapeq/gap_solver.hpp"
#include "gapeq/thermo.hpp"

using namespace gapeq;

namespace {

const PhysicalParams kParams{};

GapOperator separable(std::size_t nodes) {
    return GapOperator(Kernel(SeparableCoupling{0.4, {0.1}}, 0.4, 0.5, kParams), kParams, nodes);
}

void BM_ApplyB(benchmark::State& state) {
    const GapOperator op = separable(static_cast<std::size_t>(state.range(0)));
    const std::vector<double> u(op.size(), 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply_b(0.05, u));
}
BENCHMARK(BM_ApplyB)->Arg(64)->Arg(128)->Arg(256);

void BM_SolveFixedPoint(benchmark::State& state) {
    const GapOperator op = separable(static_cast<std::size_t>(state.range(0)));
    SolverOptions opts;
    opts.method = static_cast<IterationMethod>(state.range(1));
    opts.max_iter = 5000;
    for (auto _ : state) benchmark::DoNotOptimize(op.solve_fixed_point(0.06, opts));
}
BENCHMARK(BM_SolveFixedPoint)
    ->Args({64, static_cast<int>(IterationMethod::newton)})
    ->Args({64, static_cast<int>(IterationMethod::anderson)})
    ->Args({64, static_cast<int>(IterationMethod::picard)})
    ->Args({128, static_cast<int>(IterationMethod::newton)});

void BM_CriticalTemperature(benchmark::State& state) {
    const GapOperator op = separable(64);
    for (auto _ : state) benchmark::DoNotOptimize(op.critical_temperature(1e-14 * op.upper().tau()));
}
BENCHMARK(BM_CriticalTemperature)->Unit(benchmark::kMillisecond);

void BM_EntropyAndCv(benchmark::State& state) {
    const GapOperator op = separable(64);
    const double tc = op.critical_temperature(1e-14 * op.upper().tau()).tc;
    const ThermoModel model(op, DensityOfStates::constant(kParams.n0), tc);
    std::vector<double> temps;
    for (int i = 0; i < 9; ++i) temps.push_back(tc * (0.2 + 0.15 * i));
    const auto threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            entropy_and_cv([&](double T) { return model.omega(T); }, temps, tc, 1e-4 * tc, true, threads));
}
BENCHMARK(BM_EntropyAndCv)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EstimateLimits(benchmark::State& state) {
    const GapOperator op = separable(64);
    const double tc = op.critical_temperature(1e-14 * op.upper().tau()).tc;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_limits(op, tc));
}
BENCHMARK(BM_EstimateLimits)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
