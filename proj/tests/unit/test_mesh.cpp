#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "ovsim/error.hpp"
#include "ovsim/mesh.hpp"

using namespace ovsim;

TEST_CASE("block mesh counts") {
  fixtures::Block b;
  b.heater = true;
  const Scene s = fixtures::block_scene(b);
  const VoxelMesh m = build_mesh(s);
  CHECK(m.nx == 4);
  CHECK(m.ny == 4);
  CHECK(m.nz == 4);
  CHECK(m.active_node_count() == 125);
  CHECK(m.exterior_faces().size() == 96);
  CHECK(m.heater_base.size() == 16);
  CHECK(m.convective_exterior.size() == 80);
  CHECK(m.pruned_elements == 0);
  CHECK(m.electrode_layers == 0);

  b.heater = false;
  const VoxelMesh cold = build_mesh(fixtures::block_scene(b));
  CHECK(cold.heater_base.empty());
  CHECK(cold.convective_exterior.size() == 96);
}

TEST_CASE("path on shared faces averages the touching cells") {
  const Scene s = fixtures::block_scene({});
  const VoxelMesh m = build_mesh(s);
  const PathSamples p = optical_path_samples(m, s);
  REQUIRE(p.sections.size() == 4);
  CHECK(p.total_length() == doctest::Approx(4e-3).epsilon(1e-12));
  for (const auto& sec : p.sections) {
    CHECK(sec.length == doctest::Approx(1e-3).epsilon(1e-9));
    REQUIRE(sec.cells.size() == 4);
    double w = 0;
    for (const auto& c : sec.cells) w += c.weight;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
  }
  // Entry to exit ordering.
  for (std::size_t i = 1; i < p.sections.size(); ++i) CHECK(p.sections[i].midpoint.x > p.sections[i - 1].midpoint.x);
}

TEST_CASE("default scene mesh") {
  const Scene s = parse_config(default_config_text());
  const VoxelMesh m = build_mesh(s);
  std::int64_t crystal = 0, solid = 0;
  for (auto mat : m.material) {
    if (mat != kVoid) ++solid;
    if (mat == m.crystal_material) ++crystal;
  }
  CHECK(crystal == 1000);
  CHECK(m.pruned_elements == 0);
  CHECK(m.heater_base.size() == 2500);
  CHECK(m.electrode_layers == 1);
  CHECK_FALSE(m.electrode_nodes[0].empty());
  CHECK_FALSE(m.electrode_nodes[1].empty());
  // Electrode terminals never share a crystal node.
  auto a = m.electrode_nodes[0], b = m.electrode_nodes[1];
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::int32_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  CHECK(both.empty());

  const PathSamples p = optical_path_samples(m, s);
  CHECK(p.sections.size() == 10);
  CHECK(p.total_length() == doctest::Approx(10e-3).epsilon(1e-12));
  for (const auto& sec : p.sections) {
    for (const auto& c : sec.cells) CHECK(m.material[c.element] == m.crystal_material);
  }
}

TEST_CASE("mesh is deterministic") {
  const Scene s = parse_config(default_config_text("cu_5_2"));
  CHECK(vtk_legacy(build_mesh(s)) == vtk_legacy(build_mesh(s)));
}

TEST_CASE("mesh errors") {
  Scene s = parse_config(default_config_text());
  s.sim.mesh_resolution = 2e-3;
  CHECK_THROWS_WITH_AS(build_mesh(s), doctest::Contains("too coarse"), MeshError);

  Scene capped = parse_config(default_config_text());
  capped.sim.max_elements = 1000;
  CHECK_THROWS_WITH_AS(build_mesh(capped), doctest::Contains("memory bound"), MeshError);
}

TEST_CASE("voxels hanging on an edge are pruned with a diagnostic") {
  std::string text = fixtures::block_text({});
  text += "[materials.n]\ndensity = 1000\nspecific_heat = 100\npoisson = 0.3\nyoungs = 1e9\n"
          "thermal_expansion = 1e-6\nconductivity = 1\n";
  text += "[primitive.loose]\nshape = \"box\"\nmaterial = \"n\"\norigin = [4e-3, 4e-3, 0]\n"
          "extents = [2e-3, 2e-3, 2e-3]\n";
  const Scene s = parse_config(text);
  const VoxelMesh m = build_mesh(s);
  CHECK(m.pruned_elements == 8);
  CHECK(m.active_node_count() == 125);
  CHECK(std::any_of(m.diagnostics.begin(), m.diagnostics.end(),
                    [](const std::string& d) { return d.find("dropped") != std::string::npos; }));
}

TEST_CASE("vtk export lists every solid cell") {
  const Scene s = fixtures::block_scene({});
  const std::string vtk = vtk_legacy(build_mesh(s));
  CHECK(vtk.find("POINTS 125 double") != std::string::npos);
  CHECK(vtk.find("CELLS 64 576") != std::string::npos);
}
