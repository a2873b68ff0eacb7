#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ovsim/scene.hpp"
#include "ovsim/types.hpp"

namespace ovsim {

inline constexpr std::uint8_t kVoid = 0xFF;

/// Element face: side is 0..5 for -x, +x, -y, +y, -z, +z.
struct Face {
  std::int32_t element = 0;
  std::uint8_t side = 0;

  friend bool operator==(const Face&, const Face&) = default;
  friend auto operator<=>(const Face&, const Face&) = default;
};

/// Structured grid of cubic voxels. Elements are indexed i + nx*(j + ny*k); grid nodes
/// i + (nx+1)*(j + (ny+1)*k). Only nodes touched by a non-void element are active and
/// receive a compact index.
struct VoxelMesh {
  int nx = 0, ny = 0, nz = 0;
  double spacing = 0.0;
  Vec3 origin;

  std::vector<std::uint8_t> material;    // per element, kVoid for empty voxels
  std::vector<std::int16_t> primitive;   // per element: primitive index, -1 electrode/void
  std::vector<std::int8_t> terminal;     // per element: electrode terminal 0/1, -1 otherwise
  std::vector<std::string> material_names;
  int crystal_material = -1;
  int electrode_layers = 0;
  std::int64_t pruned_elements = 0;  // voxels dropped for lacking face contact with the body

  std::vector<std::int32_t> node_index;  // grid node -> compact index or -1
  std::vector<std::int32_t> active_nodes;  // compact index -> grid node

  // Boundary classification (filled by classify_boundaries).
  std::vector<Face> heater_base;
  std::vector<Face> convective_exterior;
  std::array<std::vector<std::int32_t>, 2> electrode_nodes;  // crystal grid nodes per terminal
  std::vector<std::string> diagnostics;

  std::int64_t element_count() const { return static_cast<std::int64_t>(nx) * ny * nz; }
  std::int64_t grid_node_count() const { return static_cast<std::int64_t>(nx + 1) * (ny + 1) * (nz + 1); }
  std::size_t active_node_count() const { return active_nodes.size(); }

  std::int32_t element_id(int i, int j, int k) const { return i + nx * (j + ny * k); }
  std::int32_t grid_node_id(int i, int j, int k) const { return i + (nx + 1) * (j + (ny + 1) * k); }
  std::array<int, 3> element_ijk(std::int32_t e) const {
    return {e % nx, (e / nx) % ny, e / (nx * ny)};
  }
  std::array<int, 3> node_ijk(std::int32_t n) const {
    return {n % (nx + 1), (n / (nx + 1)) % (ny + 1), n / ((nx + 1) * (ny + 1))};
  }
  Vec3 node_position(std::int32_t grid_node) const;
  Vec3 element_centroid(std::int32_t e) const;
  /// Grid node ids of an element, local order a + 2b + 4c for offsets (a, b, c).
  std::array<std::int32_t, 8> element_nodes(std::int32_t e) const;
  bool is_solid(int i, int j, int k) const;
  /// All exterior faces (solid element next to void or the grid boundary).
  std::vector<Face> exterior_faces() const;
};

/// One optical-path section. A path lying on a shared face or edge touches several
/// elements; each carries an equal weight and field values are averaged over them.
struct PathSection {
  double length = 0.0;
  Vec3 midpoint;
  struct Cell {
    std::int32_t element = 0;
    double weight = 0.0;
  };
  std::vector<Cell> cells;
};

struct PathSamples {
  Vec3 direction;
  std::vector<PathSection> sections;  // entry -> exit

  double total_length() const;
};

/// Assigns each voxel the material of the last-listed primitive containing its centroid,
/// then lays the electrode layers (at least one voxel) on the crystal faces. Only the
/// largest face-connected set of voxels is kept.
/// Throws MeshError for a too-coarse resolution or an exceeded element cap.
VoxelMesh voxelize(const Scene& scene);

/// Splits exterior faces into heater_base (downward faces of heater primitives) and
/// convective_exterior, and records crystal nodes in contact with each electrode.
void classify_boundaries(VoxelMesh& mesh, const Scene& scene);

/// voxelize + classify_boundaries.
VoxelMesh build_mesh(const Scene& scene);

/// One section per crossed element along the scene's optical path.
/// Throws MeshError if the path leaves the crystal region.
PathSamples optical_path_samples(const VoxelMesh& mesh, const Scene& scene);

/// Legacy VTK unstructured grid with a per-cell material scalar.
std::string vtk_legacy(const VoxelMesh& mesh);

}  // namespace ovsim
