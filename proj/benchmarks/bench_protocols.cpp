#include <benchmark/benchmark.h>

#include "siftlab/montecarlo.hpp"
#include "siftlab/protocols.hpp"

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

void BM_IterativeSifting(benchmark::State& state) {
    SiftParams params = make(static_cast<int>(state.range(0)),
                             static_cast<int>(state.range(0)), 0.5);
    uint64_t t = 0;
    for (auto _ : state) {
        Rng rng(123, t++);
        EvePolicy eve = EvePolicy::passive();
        SiftResult res = run_iterative_sifting(params, eve, rng);
        benchmark::DoNotOptimize(res.rounds_used);
    }
}
BENCHMARK(BM_IterativeSifting)->Arg(1)->Arg(8)->Arg(64);

void BM_LcaSifting(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    SiftParams params = make(n, n, 0.5, 5 * n);
    uint64_t t = 0;
    for (auto _ : state) {
        Rng rng(123, t++);
        EvePolicy eve = EvePolicy::passive();
        SiftResult res = run_lca_sifting(params, eve, rng);
        benchmark::DoNotOptimize(res.aborted);
    }
}
BENCHMARK(BM_LcaSifting)->Arg(1)->Arg(8)->Arg(64);

void BM_AdaptiveAttackRun(benchmark::State& state) {
    SiftParams params = make(1, 1, 0.5);
    uint64_t t = 0;
    for (auto _ : state) {
        Rng rng(321, t++);
        EvePolicy eve = EvePolicy::leak();
        SiftResult res = run_iterative_sifting(params, eve, rng);
        benchmark::DoNotOptimize(res.s.data());
    }
}
BENCHMARK(BM_AdaptiveAttackRun);

void BM_ErrorRateEstimate(benchmark::State& state) {
    SiftParams params = make(1, 1, 0.6);
    for (auto _ : state) {
        ErrorRateEstimate e = estimate_error_rate(Protocol::Iterative, params,
                                                  EvePolicy::both(), 10000, 7, 1);
        benchmark::DoNotOptimize(e.error_rate.mean);
    }
}
BENCHMARK(BM_ErrorRateEstimate)->Unit(benchmark::kMillisecond);

} // namespace
