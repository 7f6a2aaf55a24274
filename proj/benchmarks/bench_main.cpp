#include <benchmark/benchmark.h>

#include <cmath>

#include <hegsim/heg_optimizer.hpp>
#include <hegsim/link_sim.hpp>
#include <hegsim/mux_model.hpp>
#include <hegsim/params.hpp>
#include <hegsim/photon_source.hpp>

using namespace hegsim;

namespace {

const CavityParams kCavity = CavityParams::from_mhz(5, 0.25, 5, 0.25);

void BM_SolvePulse(benchmark::State& state) {
    const PulseSpec spec{10 * critical_pulse_width(kCavity), 5.0, static_cast<std::size_t>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(solve_pulse(kCavity, spec).p_e);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolvePulse)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_ForwardOracle(benchmark::State& state) {
    const PulseSpec spec{10 * critical_pulse_width(kCavity), 5.0, static_cast<std::size_t>(state.range(0))};
    const PulseSolution s = solve_pulse(kCavity, spec);
    for (auto _ : state) benchmark::DoNotOptimize(forward_oracle(kCavity, s.omega, spec).p_e);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardOracle)->Arg(4096)->Arg(16384);

void BM_OptimizeHeg(benchmark::State& state) {
    HegOptions o;
    o.tau_points = static_cast<std::size_t>(state.range(0));
    o.kappa_ex_points = o.tau_points;
    const double g = mhz_over_2pi(5);
    for (auto _ : state) benchmark::DoNotOptimize(optimize(g, mhz_over_2pi(0.25), mhz_over_2pi(0.25), o).rate_bound);
}
BENCHMARK(BM_OptimizeHeg)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_OptimizeM(benchmark::State& state) {
    const MuxScenario s{static_cast<std::size_t>(state.range(0)), 0.2, 1e-6, 20e-6, 1000e-6, 2};
    for (auto _ : state) benchmark::DoNotOptimize(optimize_m(s).rate);
}
BENCHMARK(BM_OptimizeM)->Arg(200)->Arg(5000);

void BM_LinkSim(benchmark::State& state) {
    SimConfig cfg;
    cfg.mux = MuxScenario{static_cast<std::size_t>(state.range(0)), 0.2, 1e-6, 20e-6, 100e-6, 1};
    cfg.p_e = std::sqrt(0.4);
    cfg.replications = 20;
    cfg.stop.max_time = 0.05;
    std::uint64_t trials = 0;
    for (auto _ : state) {
        const SimReport r = run(cfg);
        trials += r.trials_total;
        benchmark::DoNotOptimize(r.empirical_rate);
    }
    state.counters["trials_per_s"] = benchmark::Counter(static_cast<double>(trials), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_LinkSim)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
