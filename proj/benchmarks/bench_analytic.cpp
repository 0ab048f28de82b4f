#include <benchmark/benchmark.h>

#include "siftlab/analytic.hpp"

using namespace siftlab;

namespace {

SiftParams make(int n, int k, double px, std::optional<int> m = std::nullopt) {
    RawParams raw;
    raw.n = n;
    raw.k = k;
    raw.p_x = px;
    if (m) raw.m = *m;
    return validate_params(raw);
}

void BM_Attack1Series(benchmark::State& state) {
    double px = static_cast<double>(state.range(0)) / 100.0;
    SeriesConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(attack1_error(px, cfg));
    }
}
BENCHMARK(BM_Attack1Series)->Arg(55)->Arg(73)->Arg(95)->Arg(99);

void BM_LcaAbortProb(benchmark::State& state) {
    SiftParams params = make(static_cast<int>(state.range(0)),
                             static_cast<int>(state.range(0)), 0.5,
                             6 * static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lca_abort_prob(params));
    }
}
BENCHMARK(BM_LcaAbortProb)->Arg(4)->Arg(16)->Arg(50);

void BM_EffIterative(benchmark::State& state) {
    SeriesConfig cfg;
    int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(eff_iterative(n, n, 0.5, cfg));
    }
}
BENCHMARK(BM_EffIterative)->Arg(1)->Arg(10)->Arg(50);

void BM_HypergeomTailGridRow(benchmark::State& state) {
    for (auto _ : state) {
        double worst = 0.0;
        for (int sigma = 0; sigma <= 60; ++sigma) {
            TailExperimentSpec spec{60, 30, 30, sigma, 0.25, 1.0};
            worst = std::max(worst, hypergeom_tail(spec));
        }
        benchmark::DoNotOptimize(worst);
    }
}
BENCHMARK(BM_HypergeomTailGridRow);

} // namespace
