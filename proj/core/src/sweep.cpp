#include "ovsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <optional>
#include <thread>

#include "ovsim/error.hpp"
#include "ovsim/signal.hpp"
#include "ovsim/thermal.hpp"

namespace ovsim {

namespace {

Scene with_mode(const Scene& scene, const ElectrodeMode& mode) {
  Scene s = scene;
  s.electrode = mode;
  return s;
}

std::vector<double> section_lengths(const PathSamples& samples) {
  std::vector<double> out;
  out.reserve(samples.sections.size());
  for (const auto& s : samples.sections) out.push_back(s.length);
  return out;
}

template <class F>
auto annotate(const std::string& id, F&& f) {
  try {
    return f();
  } catch (const SolverError& e) {
    throw SolverError(id + ": " + e.what());
  } catch (const MeshError& e) {
    throw MeshError(id + ": " + e.what());
  }
}

bool same(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

FieldResult evaluate_field(const Scene& scene, const ElectrodeMode& mode, const EvaluationHooks& hooks) {
  const std::string id = mode_id(mode.name);
  return annotate(id, [&] {
    const Scene s = with_mode(scene, mode);
    const VoxelMesh mesh = build_mesh(s);
    if (hooks.on_mesh) hooks.on_mesh(mesh);
    const PathSamples samples = optical_path_samples(mesh, s);
    const TransformSet ts = build_transforms(s.optics);
    const PotentialField pf = solve_potential(mesh, s.materials, mode, std::min(1e-10, s.sim.solver_rel_tol));
    const FieldSummary summary = mean_field_angle(pf, samples);
    if (hooks.on_field) hooks.on_field(mesh, pf, summary);
    return FieldResult{id, summary.mean_angle, half_wave_voltage(pf, samples, s.optics, ts), summary.mean_field};
  });
}

ModeResult evaluate_mode(const Scene& scene, const ElectrodeMode& mode, const EvaluationHooks& hooks) {
  const std::string id = mode_id(mode.name);
  return annotate(id, [&] {
    const Scene s = with_mode(scene, mode);
    const VoxelMesh mesh = build_mesh(s);
    if (hooks.on_mesh) hooks.on_mesh(mesh);
    const PathSamples samples = optical_path_samples(mesh, s);
    const std::vector<double> lengths = section_lengths(samples);
    const Axis axis = propagation_axis(samples.direction);
    const TransformSet ts = build_transforms(s.optics);

    ModeResult r;
    r.name = id;
    r.mode = mode;

    const PotentialField pf = solve_potential(mesh, s.materials, mode, std::min(1e-10, s.sim.solver_rel_tol));
    const FieldSummary summary = mean_field_angle(pf, samples);
    if (hooks.on_field) hooks.on_field(mesh, pf, summary);
    r.mean_angle = summary.mean_angle;
    r.hwv = half_wave_voltage(pf, samples, s.optics, ts);

    const TemperatureHistory history = run_transient(mesh, s.materials, s.sim);
    std::optional<ThermoelasticSolver> solver;
    DisplacementField previous;  // warm start for the next snapshot
    for (std::size_t n = 0; n < history.snapshot_count(); ++n) {
      const std::vector<double>& T = history.fields[n];
      if (hooks.on_temperature) hooks.on_temperature(n, history.times[n], mesh, T);
      const bool isothermal = std::all_of(T.begin(), T.end(), [&](double v) { return v == s.sim.reference_T; });
      StressField stress;
      if (isothermal) {
        stress.stress.assign(mesh.material.size(), SymTensor{});
        stress.strain.assign(mesh.material.size(), SymTensor{});
      } else {
        if (!solver) solver.emplace(mesh, s.materials, Support::heater_base, s.sim.solver_rel_tol);
        previous = solver->solve(T, s.sim.reference_T, &previous);
        stress = recover_stress(mesh, s.materials, previous, T, s.sim.reference_T);
      }
      if (hooks.on_stress) hooks.on_stress(n, history.times[n], mesh, stress);
      const std::vector<SymTensor> path = stress_along_path(stress, samples);
      const std::vector<SectionBirefringence> sections = stress_sections(path, lengths, ts, s.optics, axis);
      if (hooks.on_sections) hooks.on_sections(n, history.times[n], sections);
      r.curve.push_back({history.times[n], crystal_mean_temperature(mesh, T), birefringence_error(sections)});
    }

    const auto [lo, hi] = std::minmax_element(r.curve.begin(), r.curve.end(),
                                              [](const CurvePoint& a, const CurvePoint& b) { return a.error < b.error; });
    r.total_error = hi->error - lo->error;
    r.corrected_total = bias_correct(r.total_error, s.sim.t_total, s.sim.tau_ref);
    return r;
  });
}

SweepReport compare_modes(const Scene& scene, std::span<const ElectrodeMode> modes, int threads) {
  if (modes.empty()) throw ConfigError("no modes to compare");
  std::vector<ElectrodeMode> order(modes.begin(), modes.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const ElectrodeMode& a, const ElectrodeMode& b) { return mode_id(a.name) < mode_id(b.name); });

  std::vector<std::optional<ModeResult>> slots(order.size());
  std::vector<std::string> errors(order.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < order.size(); i = next++) {
      try {
        slots[i] = evaluate_mode(scene, order[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_threads = std::clamp(threads, 1, static_cast<int>(order.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepReport report;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (slots[i]) {
      report.results.push_back(std::move(*slots[i]));
    } else if (!report.partial) {
      report.partial = true;
      report.failure = errors[i];
    }
  }
  std::vector<const ModeResult*> ranked;
  for (const auto& r : report.results) ranked.push_back(&r);
  std::stable_sort(ranked.begin(), ranked.end(), [](const ModeResult* a, const ModeResult* b) {
    if (a->corrected_total != b->corrected_total) return a->corrected_total < b->corrected_total;
    return a->name < b->name;
  });
  for (const auto* r : ranked) report.ranking.push_back(r->name);
  return report;
}

ElectrodeMode family_mode(Family family, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("family parameter outside [0, 1]");
  double rx = 0.0, ry = 0.0;
  ElectrodeMode m;
  if (family == Family::cu) {
    m = builtin_mode("cu_10_0");
    if (s <= 0.5) {
      rx = 10.0 - 10.0 * s;
      ry = 4.0 * s;
    } else {
      rx = 5.0;
      ry = 2.0 + 4.0 * (s - 0.5);
    }
  } else {
    m = builtin_mode("ito_0_5");
    rx = 0.0;
    ry = 5.0 + 5.0 * s;
  }
  for (const auto& id : builtin_mode_ids()) {
    const ElectrodeMode b = builtin_mode(id);
    if (b.kind == m.kind && same(b.ratio_x, rx) && same(b.ratio_y, ry)) return b;
  }
  m.ratio_x = rx;
  m.ratio_y = ry;
  char name[64];
  std::snprintf(name, sizeof name, "%s %.4g:%.4g", family == Family::cu ? "Cu" : "ITO", rx, ry);
  m.name = name;
  return m;
}

std::vector<double> uniform_grid(int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return g;
}

OptimizeResult optimize_ratio(const Scene& scene, Family family, std::span<const double> grid, int threads) {
  if (grid.empty()) throw ConfigError("empty ratio grid");
  std::vector<ElectrodeMode> modes;
  for (double s : grid) {
    ElectrodeMode m = family_mode(family, s);
    const bool seen = std::any_of(modes.begin(), modes.end(),
                                  [&](const ElectrodeMode& o) { return mode_id(o.name) == mode_id(m.name); });
    if (!seen) modes.push_back(std::move(m));
  }
  OptimizeResult out;
  out.report = compare_modes(scene, modes, threads);
  if (out.report.partial) throw SolverError(out.report.failure);

  std::optional<std::size_t> best;
  for (double s : grid) {
    const std::string id = mode_id(family_mode(family, s).name);
    const auto it = std::find_if(out.report.results.begin(), out.report.results.end(),
                                 [&](const ModeResult& r) { return r.name == id; });
    out.report.trace.push_back({s, it->mode.ratio_x, it->mode.ratio_y, it->corrected_total});
    const std::size_t idx = static_cast<std::size_t>(it - out.report.results.begin());
    if (!best || it->corrected_total < out.report.results[*best].corrected_total) best = idx;
  }
  out.best = out.report.results[*best];
  return out;
}

}  // namespace ovsim
