// Serial and OpenMP arm kernels, whole-robot runs and the sweep at different job counts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "octoswim/kernels.hpp"
#include "octoswim/scenario.hpp"

using namespace octoswim;

namespace {

struct ArmBatch {
    ArmModel model;
    FluidEnvironment env;
    std::vector<ArmState> states;
    std::vector<RootDrive> drives;
    std::vector<AmbientFlow> ambient;
    std::vector<ArmStep> out;

    ArmBatch(std::size_t arms, int segments) {
        ArmGeometry g;
        g.incision_depth = 0.7;
        g.n_segments = segments;
        model = build_arm(g, ArmMaterial{});
        for (std::size_t i = 0; i < arms; ++i) {
            const double angle = 0.3 + 0.01 * static_cast<double>(i);
            states.push_back(rest_state(model, angle));
            drives.push_back({angle + 1e-4, 1.0});
        }
        ambient.resize(arms);
        out.resize(arms);
    }
};

void kernel(benchmark::State& state, Execution exec) {
    ArmBatch b(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        step_arms(exec, b.model, b.states, b.drives, b.ambient, b.env, 1e-4, b.out);
        benchmark::DoNotOptimize(b.out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StepArmsSerial(benchmark::State& state) { kernel(state, Execution::serial); }
void BM_StepArmsParallel(benchmark::State& state) { kernel(state, Execution::parallel); }

void BM_Simulate(benchmark::State& state) {
    ScenarioConfig c = default_scenario();
    c.robot.execution = state.range(0) ? Execution::parallel : Execution::serial;
    SimulationParams p;
    p.duration = 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(c.robot, p).rows.size());
}

void BM_Sweep(benchmark::State& state) {
    ScenarioConfig c = default_scenario();
    c.sim.duration = 4.0;
    c.sweep.presets = {MechanismGeometry(25.0, 66.0, 40.0), MechanismGeometry(19.5, 83.0, 40.0)};
    c.sweep.incision_depths = {0.0, 0.7};
    c.sweep.rpms = {33.0};
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c, static_cast<int>(state.range(0))).size());
}

}  // namespace

BENCHMARK(BM_StepArmsSerial)->Args({8, 10})->Args({8, 40})->Args({64, 40})->UseRealTime();
BENCHMARK(BM_StepArmsParallel)->Args({8, 10})->Args({8, 40})->Args({64, 40})->UseRealTime();
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep)->Arg(1)->Arg(omp_get_max_threads())->Unit(benchmark::kMillisecond)->Iterations(1)->UseRealTime();

BENCHMARK_MAIN();
