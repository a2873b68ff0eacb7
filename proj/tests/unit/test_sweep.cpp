#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "ovsim/error.hpp"
#include "ovsim/signal.hpp"
#include "ovsim/sweep.hpp"

using namespace ovsim;

TEST_CASE("mode evaluation produces the error curve and its range") {
  const Scene s = fixtures::mini_scene("cu_5_2", 10.0);
  std::size_t temps = 0, stresses = 0, sections = 0, fields = 0;
  EvaluationHooks hooks;
  hooks.on_temperature = [&](std::size_t, double, const VoxelMesh&, std::span<const double>) { ++temps; };
  hooks.on_stress = [&](std::size_t, double, const VoxelMesh&, const StressField&) { ++stresses; };
  hooks.on_sections = [&](std::size_t, double, std::span<const SectionBirefringence> secs) {
    CHECK(secs.size() == 10);
    ++sections;
  };
  hooks.on_field = [&](const VoxelMesh&, const PotentialField&, const FieldSummary&) { ++fields; };
  const ModeResult r = evaluate_mode(s, *s.electrode, hooks);
  CHECK(r.name == "cu_5_2");
  REQUIRE(r.curve.size() == 3);
  CHECK(temps == 3);
  CHECK(stresses == 3);
  CHECK(sections == 3);
  CHECK(fields == 1);
  CHECK(r.curve[0].time == 0.0);
  CHECK(r.curve[0].error == 0.0);
  CHECK(r.curve[0].crystal_T == s.sim.ambient_T);
  double lo = 0, hi = 0;
  for (const auto& p : r.curve) {
    lo = std::min(lo, p.error);
    hi = std::max(hi, p.error);
  }
  CHECK(r.total_error == hi - lo);
  CHECK(r.total_error > 0.0);
  // tau_ref defaults to the simulated window, so the correction is the identity here.
  CHECK(s.sim.tau_ref == 10.0);
  CHECK(r.corrected_total == r.total_error);
  Scene ref = s;
  ref.sim.tau_ref = 60.0;
  CHECK(evaluate_mode(ref, *s.electrode).corrected_total == bias_correct(r.total_error, 10.0, 60.0));
  CHECK(r.mean_angle > 60.0);
  CHECK(r.mean_angle < 80.0);
  CHECK(std::isfinite(r.hwv));

  CHECK(evaluate_mode(s, *s.electrode) == r);
}

TEST_CASE("comparison is independent of thread count and input order") {
  const Scene s = fixtures::mini_scene("cu_10_0", 5.0);
  const std::vector<ElectrodeMode> modes{builtin_mode("ito_0_7"), builtin_mode("cu_5_4"), builtin_mode("cu_10_0")};
  const SweepReport one = compare_modes(s, modes, 1);
  const std::vector<ElectrodeMode> reversed(modes.rbegin(), modes.rend());
  const SweepReport three = compare_modes(s, reversed, 3);
  REQUIRE(one.results.size() == 3);
  CHECK_FALSE(one.partial);
  CHECK(one.results == three.results);
  CHECK(one.ranking == three.ranking);
  CHECK(one.results[0].name == "cu_10_0");
  CHECK(one.results[1].name == "cu_5_4");
  CHECK(one.results[2].name == "ito_0_7");
  for (std::size_t i = 1; i < one.ranking.size(); ++i) {
    auto total = [&](const std::string& id) {
      return std::find_if(one.results.begin(), one.results.end(), [&](const ModeResult& r) { return r.name == id; })
          ->corrected_total;
    };
    CHECK(total(one.ranking[i - 1]) <= total(one.ranking[i]));
  }
}

TEST_CASE("a failing mode yields a partial report") {
  const Scene s = fixtures::mini_scene("cu_10_0", 5.0);
  ElectrodeMode thin = builtin_mode("cu_5_2");
  thin.thickness = 0.1e-3;
  const std::vector<ElectrodeMode> modes{builtin_mode("cu_10_0"), thin};
  const SweepReport r = compare_modes(s, modes, 1);
  CHECK(r.partial);
  CHECK(r.results.size() == 1);
  CHECK(r.failure.find("cu_5_2") != std::string::npos);
  CHECK_THROWS_AS(compare_modes(s, {}, 1), ConfigError);
}

TEST_CASE("ratio families pass through the built-in modes") {
  CHECK(family_mode(Family::cu, 0.0) == builtin_mode("cu_10_0"));
  CHECK(family_mode(Family::cu, 0.5) == builtin_mode("cu_5_2"));
  CHECK(family_mode(Family::cu, 1.0) == builtin_mode("cu_5_4"));
  CHECK(family_mode(Family::ito, 0.0) == builtin_mode("ito_0_5"));
  CHECK(family_mode(Family::ito, 1.0) == builtin_mode("ito_0_10"));
  const ElectrodeMode q = family_mode(Family::cu, 0.25);
  CHECK(q.ratio_x == 7.5);
  CHECK(q.ratio_y == 1.0);
  CHECK(q.name == "Cu 7.5:1");
  CHECK(q.kind == ElectrodeKind::metal);
  CHECK_THROWS_AS(family_mode(Family::ito, 1.5), ConfigError);

  CHECK(uniform_grid(1) == std::vector<double>{0.0});
  CHECK(uniform_grid(3) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK_THROWS_AS(uniform_grid(0), ConfigError);
}

TEST_CASE("grid optimizer returns the smallest corrected total") {
  const Scene s = fixtures::mini_scene("cu_10_0", 5.0);
  const auto grid = uniform_grid(3);
  const OptimizeResult o = optimize_ratio(s, Family::cu, grid, 1);
  REQUIRE(o.report.trace.size() == 3);
  for (const auto& t : o.report.trace) CHECK(o.best.corrected_total <= t.objective);
  CHECK(o.report.trace[1].ratio_x == 5.0);
  CHECK(o.report.trace[1].ratio_y == 2.0);
  CHECK_THROWS_AS(optimize_ratio(s, Family::cu, {}, 1), ConfigError);
}
