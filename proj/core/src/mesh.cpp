#include "ovsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ovsim/error.hpp"

namespace ovsim {
namespace {

// Number of cells covering `extent`, tolerant to round-off in extent / h.
int cell_count(double extent, double h) {
  const double q = extent / h;
  const double r = std::round(q);
  if (std::abs(q - r) < 1e-6) return static_cast<int>(r);
  return static_cast<int>(std::ceil(q));
}

bool in_box(Vec3 p, Vec3 lo, Vec3 hi) {
  return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
}

}  // namespace

Vec3 VoxelMesh::node_position(std::int32_t grid_node) const {
  const auto [i, j, k] = node_ijk(grid_node);
  return {origin.x + i * spacing, origin.y + j * spacing, origin.z + k * spacing};
}

Vec3 VoxelMesh::element_centroid(std::int32_t e) const {
  const auto [i, j, k] = element_ijk(e);
  return {origin.x + (i + 0.5) * spacing, origin.y + (j + 0.5) * spacing, origin.z + (k + 0.5) * spacing};
}

std::array<std::int32_t, 8> VoxelMesh::element_nodes(std::int32_t e) const {
  const auto [i, j, k] = element_ijk(e);
  std::array<std::int32_t, 8> n{};
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) n[a + 2 * b + 4 * c] = grid_node_id(i + a, j + b, k + c);
  return n;
}

bool VoxelMesh::is_solid(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return false;
  return material[element_id(i, j, k)] != kVoid;
}

std::vector<Face> VoxelMesh::exterior_faces() const {
  static constexpr int dir[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  std::vector<Face> out;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!is_solid(i, j, k)) continue;
        for (std::uint8_t s = 0; s < 6; ++s) {
          if (!is_solid(i + dir[s][0], j + dir[s][1], k + dir[s][2])) out.push_back({element_id(i, j, k), s});
        }
      }
  return out;
}

double PathSamples::total_length() const {
  double sum = 0.0;
  for (const auto& s : sections) sum += s.length;
  return sum;
}

VoxelMesh voxelize(const Scene& scene) {
  const double h = scene.sim.mesh_resolution;
  if (!(h > 0.0)) throw MeshError("mesh resolution must be positive");

  VoxelMesh mesh;
  mesh.spacing = h;

  std::vector<ElectrodeBox> electrodes;
  if (scene.electrode) {
    const double t = scene.electrode->thickness;
    if (t < 0.5 * h * (1.0 - 1e-9)) {
      throw MeshError("resolution too coarse: electrode thickness " + std::to_string(t) +
                      " m is thinner than half a voxel");
    }
    mesh.electrode_layers = std::max(1, static_cast<int>(std::lround(t / h)));
    electrodes = electrode_boxes(scene, mesh.electrode_layers * h);
  }

  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-lo.x, -lo.y, -lo.z};
  auto grow = [&](Vec3 a, Vec3 b) {
    for (int ax = 0; ax < 3; ++ax) {
      lo[ax] = std::min(lo[ax], a[ax]);
      hi[ax] = std::max(hi[ax], b[ax]);
    }
  };
  for (const auto& p : scene.geometry.primitives) grow(p.lower(), p.upper());
  for (const auto& e : electrodes) grow(e.lower, e.upper);

  mesh.origin = lo;
  mesh.nx = cell_count(hi.x - lo.x, h);
  mesh.ny = cell_count(hi.y - lo.y, h);
  mesh.nz = cell_count(hi.z - lo.z, h);
  if (mesh.element_count() > scene.sim.max_elements) {
    throw MeshError("memory bound exceeded: " + std::to_string(mesh.element_count()) + " voxels > cap " +
                    std::to_string(scene.sim.max_elements));
  }

  for (const auto& m : scene.materials) mesh.material_names.push_back(m.name);
  mesh.crystal_material = scene.material_index(scene.optics.crystal);

  const auto n = static_cast<std::size_t>(mesh.element_count());
  mesh.material.assign(n, kVoid);
  mesh.primitive.assign(n, -1);
  mesh.terminal.assign(n, -1);

  const int electrode_material = scene.electrode ? scene.material_index(scene.electrode->material) : -1;
  for (int k = 0; k < mesh.nz; ++k)
    for (int j = 0; j < mesh.ny; ++j)
      for (int i = 0; i < mesh.nx; ++i) {
        const std::int32_t e = mesh.element_id(i, j, k);
        const Vec3 c = mesh.element_centroid(e);
        for (std::size_t p = 0; p < scene.geometry.primitives.size(); ++p) {
          const auto& prim = scene.geometry.primitives[p];
          if (prim.contains(c)) {
            mesh.material[e] = static_cast<std::uint8_t>(scene.material_index(prim.material));
            mesh.primitive[e] = static_cast<std::int16_t>(p);
          }
        }
        for (const auto& box : electrodes) {
          if (in_box(c, box.lower, box.upper)) {
            mesh.material[e] = static_cast<std::uint8_t>(electrode_material);
            mesh.primitive[e] = -1;
            mesh.terminal[e] = static_cast<std::int8_t>(box.terminal);
          }
        }
      }

  // Voxels of a curved boundary can touch the body only along an edge or a corner, which
  // leaves hinge mechanisms in the stiffness. Keep the largest face-connected component.
  {
    std::vector<std::int32_t> comp(n, -1);
    std::vector<std::int32_t> stack;
    std::vector<std::int64_t> sizes;
    for (std::int32_t seed = 0; seed < static_cast<std::int32_t>(n); ++seed) {
      if (mesh.material[seed] == kVoid || comp[seed] >= 0) continue;
      const auto id = static_cast<std::int32_t>(sizes.size());
      sizes.push_back(0);
      comp[seed] = id;
      stack.push_back(seed);
      while (!stack.empty()) {
        const std::int32_t e = stack.back();
        stack.pop_back();
        ++sizes[id];
        const auto [i, j, k] = mesh.element_ijk(e);
        const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k}, {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        for (const auto& q : nb) {
          if (!mesh.is_solid(q[0], q[1], q[2])) continue;
          const std::int32_t f = mesh.element_id(q[0], q[1], q[2]);
          if (comp[f] < 0) {
            comp[f] = id;
            stack.push_back(f);
          }
        }
      }
    }
    if (sizes.empty()) throw MeshError("missing geometry: no solid voxels");
    const auto keep = static_cast<std::int32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t e = 0; e < n; ++e) {
      if (comp[e] >= 0 && comp[e] != keep) {
        mesh.material[e] = kVoid;
        mesh.primitive[e] = -1;
        mesh.terminal[e] = -1;
        ++mesh.pruned_elements;
      }
    }
  }

  mesh.node_index.assign(static_cast<std::size_t>(mesh.grid_node_count()), -1);
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(n); ++e) {
    if (mesh.material[e] == kVoid) continue;
    for (auto g : mesh.element_nodes(e)) mesh.node_index[g] = 0;
  }
  for (std::int32_t g = 0; g < static_cast<std::int32_t>(mesh.node_index.size()); ++g) {
    if (mesh.node_index[g] == 0) {
      mesh.node_index[g] = static_cast<std::int32_t>(mesh.active_nodes.size());
      mesh.active_nodes.push_back(g);
    }
  }
  return mesh;
}

void classify_boundaries(VoxelMesh& mesh, const Scene& scene) {
  mesh.heater_base.clear();
  mesh.convective_exterior.clear();
  mesh.electrode_nodes[0].clear();
  mesh.electrode_nodes[1].clear();
  mesh.diagnostics.clear();

  bool any_heater = false;
  for (std::size_t p = 0; p < scene.geometry.primitives.size(); ++p) {
    any_heater = any_heater || scene.geometry.primitives[p].heater;
  }
  if (!any_heater) mesh.diagnostics.push_back("no heater primitive: heater_base is empty");
  if (mesh.pruned_elements > 0) {
    mesh.diagnostics.push_back(std::to_string(mesh.pruned_elements) +
                               " voxels without face contact to the body were dropped");
  }

  for (const Face& f : mesh.exterior_faces()) {
    const int p = mesh.primitive[f.element];
    const bool heater = p >= 0 && scene.geometry.primitives[p].heater;
    if (heater && f.side == 4) {
      mesh.heater_base.push_back(f);
    } else {
      mesh.convective_exterior.push_back(f);
    }
  }

  // Crystal nodes shared with electrode elements.
  std::vector<std::int8_t> tag(mesh.node_index.size(), -1);
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.terminal[e] < 0) continue;
    for (auto g : mesh.element_nodes(e)) {
      if (tag[g] >= 0 && tag[g] != mesh.terminal[e]) {
        throw MeshError("electrodes short-circuited: terminals share a node");
      }
      tag[g] = mesh.terminal[e];
    }
  }
  std::vector<char> crystal_node(mesh.node_index.size(), 0);
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.material[e] != mesh.crystal_material) continue;
    for (auto g : mesh.element_nodes(e)) crystal_node[g] = 1;
  }
  for (std::int32_t g = 0; g < static_cast<std::int32_t>(tag.size()); ++g) {
    if (tag[g] >= 0 && crystal_node[g]) mesh.electrode_nodes[tag[g]].push_back(g);
  }
  if (scene.electrode && (mesh.electrode_nodes[0].empty() || mesh.electrode_nodes[1].empty())) {
    mesh.diagnostics.push_back("electrode does not touch the crystal");
  }
}

VoxelMesh build_mesh(const Scene& scene) {
  VoxelMesh mesh = voxelize(scene);
  classify_boundaries(mesh, scene);
  return mesh;
}

PathSamples optical_path_samples(const VoxelMesh& mesh, const Scene& scene) {
  const auto& path = scene.geometry.path;
  const double h = mesh.spacing;
  const double L = path.length;
  const Vec3 d = path.direction;

  // Parameters where the path crosses grid planes.
  std::vector<double> ts{0.0, L};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) continue;
    const int n = a == 0 ? mesh.nx : (a == 1 ? mesh.ny : mesh.nz);
    for (int i = 0; i <= n; ++i) {
      const double plane = mesh.origin[a] + i * h;
      const double t = (plane - path.entry[a]) / d[a];
      if (t > 0.0 && t < L) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());

  const double snap = 1e-9 * h;
  PathSamples out;
  out.direction = d;
  double start = ts.front();
  for (std::size_t s = 1; s < ts.size(); ++s) {
    if (ts[s] - start <= snap) continue;
    const double end = ts[s];
    PathSection section;
    section.length = end - start;
    section.midpoint = path.entry + (0.5 * (start + end)) * d;

    // Candidate cells per axis; a coordinate on a grid plane touches both neighbours.
    std::array<std::vector<int>, 3> idx;
    const int dims[3] = {mesh.nx, mesh.ny, mesh.nz};
    for (int a = 0; a < 3; ++a) {
      const double u = (section.midpoint[a] - mesh.origin[a]) / h;
      const double r = std::round(u);
      if (std::abs(u - r) < 1e-9) {
        for (int c : {static_cast<int>(r) - 1, static_cast<int>(r)}) {
          if (c >= 0 && c < dims[a]) idx[a].push_back(c);
        }
      } else {
        const int c = static_cast<int>(std::floor(u));
        if (c >= 0 && c < dims[a]) idx[a].push_back(c);
      }
      if (idx[a].empty()) throw MeshError("optical path leaves the mesh");
    }
    std::vector<PathSection::Cell> cells;
    for (int k : idx[2])
      for (int j : idx[1])
        for (int i : idx[0]) cells.push_back({mesh.element_id(i, j, k), 0.0});
    // Only crystal elements carry the path; faces shared with non-crystal cells belong
    // to the crystal side.
    std::erase_if(cells, [&](const PathSection::Cell& c) { return mesh.material[c.element] != mesh.crystal_material; });
    if (cells.empty()) throw MeshError("optical path exits the crystal region");
    for (auto& c : cells) c.weight = 1.0 / static_cast<double>(cells.size());
    section.cells = std::move(cells);
    out.sections.push_back(std::move(section));
    start = end;
  }
  // Absorb a sub-snap tail into the last section so the lengths sum to L.
  if (!out.sections.empty() && L - start > 0.0) out.sections.back().length += L - start;
  return out;
}

std::string vtk_legacy(const VoxelMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "# vtk DataFile Version 3.0\novsim voxel mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.active_nodes.size() << " double\n";
  for (auto g : mesh.active_nodes) {
    const Vec3 p = mesh.node_position(g);
    out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  }
  std::vector<std::int32_t> cells;
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.material[e] != kVoid) cells.push_back(e);
  }
  out << "CELLS " << cells.size() << ' ' << cells.size() * 9 << '\n';
  // VTK_HEXAHEDRON ordering: bottom face counter-clockwise, then top face.
  static constexpr int order[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  for (auto e : cells) {
    const auto n = mesh.element_nodes(e);
    out << 8;
    for (int o : order) out << ' ' << mesh.node_index[n[o]];
    out << '\n';
  }
  out << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) out << "12\n";
  out << "CELL_DATA " << cells.size() << "\nSCALARS material int 1\nLOOKUP_TABLE default\n";
  for (auto e : cells) out << static_cast<int>(mesh.material[e]) << '\n';
  return out.str();
}

}  // namespace ovsim
