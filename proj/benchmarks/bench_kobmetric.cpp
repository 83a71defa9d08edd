#include <benchmark/benchmark.h>

#include "kobmetric/chains.hpp"
#include "kobmetric/dbar.hpp"
#include "kobmetric/metrics.hpp"

using namespace kobmetric;

namespace {

OptimizerBudget bench_budget() {
    OptimizerBudget b;
    b.max_iterations = 200;
    b.restarts = 3;
    b.degree = 8;
    b.seed = 1;
    return b;
}

void bm_kobayashi_upper_ball(benchmark::State& state) {
    const DomainSpec ball = DomainSpec::ball(2);
    const MetricQuery q{Point{cplx(0.3, 0.2), cplx(-0.1, 0.4)},
                        Direction{cplx(1.0, 0.5), cplx(-0.3, 0.2)}};
    const OptimizerBudget budget = bench_budget();
    for (auto _ : state) benchmark::DoNotOptimize(kobayashi_upper(ball, q, budget).value);
}

void bm_kobayashi_upper_egg(benchmark::State& state) {
    const DomainSpec egg = DomainSpec::egg({1, 2});
    const MetricQuery q{Point{cplx(0.3, 0.0), cplx(0.2, 0.1)},
                        Direction{cplx(0.6, 0.0), cplx(0.0, 0.8)}};
    const OptimizerBudget budget = bench_budget();
    for (auto _ : state) benchmark::DoNotOptimize(kobayashi_upper(egg, q, budget).value);
}

void bm_caratheodory_lower_egg(benchmark::State& state) {
    const DomainSpec egg = DomainSpec::egg({1, 2});
    const MetricQuery q{Point{cplx(0.3, 0.0), cplx(0.2, 0.1)},
                        Direction{cplx(0.6, 0.0), cplx(0.0, 0.8)}};
    const OptimizerBudget budget = bench_budget();
    for (auto _ : state) benchmark::DoNotOptimize(caratheodory_lower(egg, q, budget).value);
}

void bm_egg_gauge(benchmark::State& state) {
    const DomainSpec egg = DomainSpec::egg({1, 2, 3});
    const Point z{cplx(0.4, 0.1), cplx(-0.3, 0.2), cplx(0.1, 0.5)};
    for (auto _ : state) benchmark::DoNotOptimize(egg.gauge(z));
}

void bm_one_disc_ball(benchmark::State& state) {
    const DomainSpec ball = DomainSpec::ball(2);
    const Point P{cplx(-0.4, 0.1), cplx(0.0, 0.0)};
    const Point Q{cplx(0.4, 0.0), cplx(0.1, 0.0)};
    const OptimizerBudget budget = bench_budget();
    for (auto _ : state) benchmark::DoNotOptimize(one_disc_distance_upper(ball, P, Q, budget));
}

void bm_cauchy_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridSpec grid = GridSpec::centered(cplx(0), 1.0, n);
    const GridField tau =
        correction_rhs([](cplx z) { return z + 0.5 * z * z; }, cplx(0.0, 1.0),
                       build_cutoff(cplx(0), 0.5), grid);
    for (auto _ : state) benchmark::DoNotOptimize(cauchy_solve(tau).values.size());
    state.SetComplexityN(n);
}

BENCHMARK(bm_kobayashi_upper_ball)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_kobayashi_upper_egg)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_caratheodory_lower_egg)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_egg_gauge)->Unit(benchmark::kNanosecond);
BENCHMARK(bm_one_disc_ball)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_cauchy_solve)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
