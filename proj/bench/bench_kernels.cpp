// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include "wipmf/exact.hpp"
#include "wipmf/experiments.hpp"
#include "wipmf/fixtures.hpp"
#include "wipmf/meanfield.hpp"
#include "wipmf/simulate.hpp"
#include "wipmf/whittle.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace wipmf;

namespace {

Exec exec_arg(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

Instance sorted_reference(double alpha) {
    const auto m = fixtures::reference3();
    return {permute_states(m, compute_indices(m).order), alpha};
}

void label(benchmark::State& st) {
    st.SetLabel(st.range(0) ? "parallel, " + std::to_string(omp_get_max_threads()) + " threads" : "serial");
}

void BM_OracleGrid(benchmark::State& st) {
    const auto m = fixtures::reference3();
    const auto grid = default_oracle_grid(m);
    for (auto _ : st) benchmark::DoNotOptimize(oracle_indices(m, grid, exec_arg(st)));
    label(st);
}

void BM_DetectAttractor(benchmark::State& st) {
    const auto map = build_map(sorted_reference(0.3));
    const auto fp = fixed_point(map);
    AttractorOptions opt;
    opt.n_starts = 1000;
    for (auto _ : st) benchmark::DoNotOptimize(detect_attractor(map, fp.m_star, opt, exec_arg(st)));
    label(st);
}

void BM_SolveExact(benchmark::State& st) {
    const auto inst = sorted_reference(0.4);
    for (auto _ : st) benchmark::DoNotOptimize(solve_exact(inst, 40, ActivationMode::exact, exec_arg(st)));
    label(st);
}

void BM_WipValueExact(benchmark::State& st) {
    const auto inst = sorted_reference(0.4);
    for (auto _ : st) benchmark::DoNotOptimize(wip_value_exact(inst, 60, ActivationMode::exact, exec_arg(st)));
    label(st);
}

void BM_Scan(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(scan(3, 5000, 7, exec_arg(st)));
    label(st);
}

void BM_ReplicateSync(benchmark::State& st) {
    const auto inst = sorted_reference(0.3);
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
    for (auto _ : st)
        benchmark::DoNotOptimize(replicate_wip_sync(inst, 50, 20000, 1000, seeds, ActivationMode::exact, exec_arg(st)));
    label(st);
}

} // namespace

BENCHMARK(BM_OracleGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DetectAttractor)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveExact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WipValueExact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Scan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReplicateSync)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
