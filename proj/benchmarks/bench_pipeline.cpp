#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "ovsim/electrostatics.hpp"
#include "ovsim/mechanics.hpp"
#include "ovsim/signal.hpp"
#include "ovsim/sweep.hpp"
#include "ovsim/thermal.hpp"

using namespace ovsim;

namespace {

// Default stack, or the default stack shrunk to a 16 mm plate when `small` is set.
Scene scene(bool small) {
  if (!small) return parse_config(default_config_text("cu_5_4"));
  const std::map<std::string, std::string> o = {
      {"OVSIM__primitive__plate__origin", "[-8e-3, -8e-3, 0]"},
      {"OVSIM__primitive__plate__extents", "[16e-3, 16e-3, 2e-3]"},
      {"OVSIM__primitive__support__origin", "[0, 0, 2e-3]"},
      {"OVSIM__primitive__support__radius", "6e-3"},
      {"OVSIM__primitive__support__height", "2e-3"},
      {"OVSIM__primitive__crystal__origin", "[-5e-3, -5e-3, 4e-3]"},
      {"OVSIM__path__entry", "[-5e-3, 0, 9e-3]"},
  };
  return parse_config(default_config_text("cu_5_4"), o);
}

void BM_BuildMesh(benchmark::State& state) {
  const Scene s = scene(state.range(0) == 0);
  for (auto _ : state) benchmark::DoNotOptimize(build_mesh(s));
}
BENCHMARK(BM_BuildMesh)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ThermalTransient(benchmark::State& state) {
  const Scene s = scene(state.range(0) == 0);
  const VoxelMesh m = build_mesh(s);
  for (auto _ : state) benchmark::DoNotOptimize(run_transient(m, s.materials, s.sim));
  state.counters["nodes"] = static_cast<double>(m.active_node_count());
}
BENCHMARK(BM_ThermalTransient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MechanicsSetup(benchmark::State& state) {
  const Scene s = scene(state.range(0) == 0);
  const VoxelMesh m = build_mesh(s);
  for (auto _ : state) benchmark::DoNotOptimize(ThermoelasticSolver(m, s.materials));
}
BENCHMARK(BM_MechanicsSetup)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MechanicsSnapshot(benchmark::State& state) {
  const Scene s = scene(state.range(0) == 0);
  const VoxelMesh m = build_mesh(s);
  SimParams p = s.sim;
  p.t_total = 10.0;
  const TemperatureHistory h = run_transient(m, s.materials, p);
  const ThermoelasticSolver solver(m, s.materials);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(h.fields.back(), s.sim.reference_T));
  state.counters["dof"] = static_cast<double>(solver.free_dof_count());
  state.counters["iterations"] = solver.last_iterations();
}
BENCHMARK(BM_MechanicsSnapshot)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FieldSolve(benchmark::State& state) {
  const Scene s = scene(true);
  const VoxelMesh m = build_mesh(s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_potential(m, s.materials, *s.electrode));
}
BENCHMARK(BM_FieldSolve)->Unit(benchmark::kMillisecond);

void BM_JonesChain(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<SectionBirefringence> secs(state.range(0));
  for (auto& s : secs) {
    s.axis = u(rng);
    s.delta = 1e-3 * u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(birefringence_error(secs));
}
BENCHMARK(BM_JonesChain)->Arg(10)->Arg(20)->Arg(100);

void BM_FitDrift(benchmark::State& state) {
  Drive d;
  d.amplitude = 1000.0;
  const Waveform w = synthesize({}, d, 47e3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_drift(w, d.frequency));
}
BENCHMARK(BM_FitDrift)->Unit(benchmark::kMillisecond);

void BM_EvaluateMode(benchmark::State& state) {
  Scene s = scene(true);
  s.sim.t_total = 20.0;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_mode(s, *s.electrode));
}
BENCHMARK(BM_EvaluateMode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
