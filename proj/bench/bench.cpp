// Serial twins against their OpenMP kernels. Arg is the worker count.
#include "syshock/calibration.hpp"
#include "syshock/dependence.hpp"
#include "syshock/market_data.hpp"
#include "syshock/montecarlo.hpp"
#include "syshock/shock_model.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace syshock;

namespace {

ModelParams bench_model() {
    return make_params({0.5, 0.6, 0.7, 0.4}, {0.2, 0.2, 0.2, 0.2, 0.2},
                       {Generator::gumbel(2.0), Generator::gumbel(1.5), Generator::gumbel(3.0),
                        Generator::gumbel(2.5)});
}

SimulationConfig sim_config(int workers) {
    SimulationConfig cfg;
    cfg.n_samples = 200000;
    cfg.n_workers = workers;
    return cfg;
}

void BM_sample_serial(benchmark::State& state) {
    const auto p = bench_model();
    for (auto _ : state) benchmark::DoNotOptimize(sample_model_serial(p, sim_config(1)));
}

void BM_sample_parallel(benchmark::State& state) {
    const auto p = bench_model();
    const int w = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_model(p, sim_config(w)));
}

void BM_tau_naive(benchmark::State& state) {
    const auto batch = sample_model(bench_model(), sim_config(1));
    const auto x = batch.column(0), y = batch.column(1);
    const std::vector<double> xs(x.begin(), x.begin() + state.range(0));
    const std::vector<double> ys(y.begin(), y.begin() + state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(empirical_tau_naive(xs, ys));
}

void BM_tau_merge(benchmark::State& state) {
    const auto batch = sample_model(bench_model(), sim_config(1));
    const auto x = batch.column(0), y = batch.column(1);
    const std::vector<double> xs(x.begin(), x.begin() + state.range(0));
    const std::vector<double> ys(y.begin(), y.begin() + state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(empirical_tau_merge(xs, ys));
}

void BM_kendall_grid_serial(benchmark::State& state) {
    const auto pair = khoudraji_pair({Generator::gumbel(2.0), 0.6});
    auto k = [&](double t) { return kendall_fn_generic_pair(pair, t); };
    for (auto _ : state) benchmark::DoNotOptimize(kendall_grid_serial(k, 100));
}

void BM_kendall_grid_parallel(benchmark::State& state) {
    const auto pair = khoudraji_pair({Generator::gumbel(2.0), 0.6});
    auto k = [&](double t) { return kendall_fn_generic_pair(pair, t); };
    const int w = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kendall_grid(k, 100, w));
}

void BM_calibrate(benchmark::State& state) {
    const TauMatrix target = model_taus(bench_model());
    OptimizerSettings opts;
    opts.restarts = 8;
    opts.max_iters = 1000;
    opts.workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(calibrate(target, Family::Gumbel, opts));
}

void BM_yearly_taus_serial(benchmark::State& state) {
    SyntheticSpec spec;
    spec.days = 250;
    spec.base_intensity = {0.01, 0.02, 0.015, 0.03};
    const auto panel = extract_intensities(synthesize_spreads(bench_model(), spec));
    for (auto _ : state) benchmark::DoNotOptimize(yearly_empirical_taus_serial(panel, 2021));
}

void BM_yearly_taus_parallel(benchmark::State& state) {
    SyntheticSpec spec;
    spec.days = 250;
    spec.base_intensity = {0.01, 0.02, 0.015, 0.03};
    const auto panel = extract_intensities(synthesize_spreads(bench_model(), spec));
    const int w = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(yearly_empirical_taus(panel, 2021, TauOn::Levels, w));
}

void worker_args(benchmark::internal::Benchmark* b) {
    b->Arg(1);
    if (omp_get_max_threads() > 1) b->Arg(omp_get_max_threads());
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_sample_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sample_parallel)->Apply(worker_args);
BENCHMARK(BM_tau_naive)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tau_merge)->Arg(2000)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kendall_grid_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_kendall_grid_parallel)->Apply(worker_args);
BENCHMARK(BM_calibrate)->Apply(worker_args);
BENCHMARK(BM_yearly_taus_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_yearly_taus_parallel)->Apply(worker_args);

BENCHMARK_MAIN();
