#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "ovsim/electrostatics.hpp"
#include "ovsim/error.hpp"
#include "ovsim/sweep.hpp"

using namespace ovsim;

TEST_CASE("potential respects the electrode values and the maximum principle") {
  const Scene s = parse_config(default_config_text("cu_5_4"));
  const VoxelMesh m = build_mesh(s);
  const PotentialField pf = solve_potential(m, s.materials, *s.electrode);
  const double half = 0.5 * s.electrode->applied_voltage;
  for (auto g : m.electrode_nodes[0]) CHECK(pf.potential[m.node_index[g]] == half);
  for (auto g : m.electrode_nodes[1]) CHECK(pf.potential[m.node_index[g]] == -half);
  for (double v : pf.potential) {
    CHECK(v <= half + 1e-9);
    CHECK(v >= -half - 1e-9);
  }
}

TEST_CASE("full-face electrodes give a uniform field") {
  // Cu 10:0 covers both y faces completely: a parallel-plate capacitor along y.
  const Scene s = parse_config(default_config_text("cu_10_0"));
  const VoxelMesh m = build_mesh(s);
  const PotentialField pf = solve_potential(m, s.materials, *s.electrode);
  const double expect = s.electrode->applied_voltage / 10e-3;
  for (std::size_t e = 0; e < pf.field.size(); ++e) {
    if (m.material[e] != m.crystal_material) continue;
    CHECK(std::abs(pf.field[e].x) < 1e-6 * expect);
    CHECK(pf.field[e].y == doctest::Approx(-expect).epsilon(1e-8));
    CHECK(std::abs(pf.field[e].z) < 1e-6 * expect);
  }
  const auto summary = mean_field_angle(pf, optical_path_samples(m, s));
  CHECK(summary.mean_angle == doctest::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("field angles of the built-in modes lie in the expected bands") {
  const Scene s = parse_config(default_config_text());
  const std::pair<const char*, double> table[] = {{"cu_10_0", 89.99}, {"cu_5_2", 71.79}, {"cu_5_4", 59.87},
                                                  {"ito_0_5", 29.61}, {"ito_0_7", 7.63},  {"ito_0_10", 0.0}};
  for (const auto& [id, angle] : table) {
    CAPTURE(id);
    const FieldResult r = evaluate_field(s, builtin_mode(id));
    CHECK(std::abs(r.mean_angle - angle) <= 2.0);
  }
}

TEST_CASE("half-wave voltage scales inversely with r41 and diverges for longitudinal fields") {
  Scene s = parse_config(default_config_text());
  std::vector<double> base;
  for (const auto& id : builtin_mode_ids()) base.push_back(evaluate_field(s, builtin_mode(id)).hwv);
  s.optics.r41 *= 0.5;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double half = evaluate_field(s, builtin_mode(builtin_mode_ids()[i])).hwv;
    CHECK(half == 2.0 * base[i]);
  }
  CHECK(std::isinf(base.back()));
  CHECK(base.front() == doctest::Approx(47.06e3).epsilon(0.2));
}

TEST_CASE("half-wave voltage is independent of the applied test voltage") {
  Scene s = parse_config(default_config_text("cu_5_2"));
  const double a = evaluate_field(s, *s.electrode).hwv;
  ElectrodeMode m = *s.electrode;
  m.applied_voltage = -250.0;
  CHECK(evaluate_field(s, m).hwv == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("electro-optic tensor is linear and symmetric in the field") {
  const Scene s = parse_config(default_config_text());
  const TransformSet ts = build_transforms(s.optics);
  const Vec3 E{1e5, -3e4, 2e4};
  const SymTensor a = electrooptic_deltaB(E, s.optics, ts);
  const SymTensor b = electrooptic_deltaB(2.0 * E, s.optics, ts);
  for (int i = 0; i < 6; ++i) CHECK(b.c[i] == doctest::Approx(2 * a.c[i]).epsilon(1e-14));
  // 43m crystals have no diagonal Pockels terms in the crystal frame: trace is zero.
  CHECK(std::abs(a.c[0] + a.c[1] + a.c[2]) < 1e-12 * s.optics.r41 * 1e5);
}

TEST_CASE("missing electrodes") {
  fixtures::Block b;
  const Scene s = fixtures::block_scene(b);
  const VoxelMesh m = build_mesh(s);
  CHECK_THROWS_WITH_AS(solve_potential(m, s.materials, builtin_mode("cu_10_0")), doctest::Contains("electrodes"),
                       SolverError);
}
