#include <benchmark/benchmark.h>

#include "qbdr/qbdr.hpp"

namespace {

using qbdr::BenchMethod;

void last_column(benchmark::State& state, BenchMethod method) {
    const int n = static_cast<int>(state.range(0));
    const int C = static_cast<int>(state.range(1));
    const qbdr::QbdBlocks b = qbdr::random_model(n, C, qbdr::bench_case_seed(1, n, C));
    for (auto _ : state) {
        qbdr::Matrix col = qbdr::last_block_column(b, method);
        benchmark::DoNotOptimize(col.data());
    }
    state.counters["C"] = C;
    state.counters["n"] = n;
}

void BM_DifferenceEquation(benchmark::State& state) { last_column(state, BenchMethod::DifferenceEq); }
void BM_Perturbation(benchmark::State& state) { last_column(state, BenchMethod::Perturbation); }

void grid(benchmark::internal::Benchmark* b) {
    for (int n : {2, 3, 4, 5}) {
        for (int C : {5, 10, 20, 40, 60, 80, 100}) b->Args({n, C});
    }
}

void BM_TransformContext(benchmark::State& state) {
    const qbdr::QbdBlocks b = qbdr::build_blocks(qbdr::example_map(), qbdr::example_ph(),
                                                 static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto ctx = qbdr::make_transform_context(b, qbdr::Complex(0.5, 3.0));
        benchmark::DoNotOptimize(ctx.Z.data());
    }
}

void BM_RewardTime(benchmark::State& state) {
    const qbdr::QbdBlocks b = qbdr::build_blocks(qbdr::example_map(), qbdr::example_ph(),
                                                 static_cast<int>(state.range(0)));
    const qbdr::RewardSpec r = qbdr::lost_revenue_rewards(b, 1.0);
    for (auto _ : state) {
        auto R = qbdr::reward_time(b, r, 5.0);
        benchmark::DoNotOptimize(R.data());
    }
}

} // namespace

BENCHMARK(BM_DifferenceEquation)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Perturbation)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TransformContext)->Arg(5)->Arg(50)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RewardTime)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
