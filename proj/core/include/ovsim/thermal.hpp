#pragma once

#include <span>
#include <vector>

#include "ovsim/mesh.hpp"
#include "ovsim/scene.hpp"

namespace ovsim {

/// Heat bookkeeping of one implicit step, in joules.
struct StepEnergy {
  double stored_change = 0.0;   // sum of rho c V dT over all nodes
  double heater_inflow = 0.0;   // dt * reaction flux at the fixed-temperature base
  double convective_loss = 0.0; // dt * sum h A (T - T_ambient)
  int iterations = 0;
};

/// Nodal temperatures (K) at every snapshot, indexed by compact node id.
struct TemperatureHistory {
  std::vector<double> times;
  std::vector<std::vector<double>> fields;
  std::vector<StepEnergy> steps;  // steps[n] advances fields[n] -> fields[n + 1]
  double ambient_T = 0.0;
  double heater_T = 0.0;

  std::size_t snapshot_count() const { return times.size(); }
};

/// Backward-Euler conduction from uniform ambient temperature; from the first step on the
/// heater base is held at heater_T. Convective exterior flux h (T - T_ambient), lumped
/// heat capacity.
/// Snapshots every t_step up to t_total. Throws SolverError on non-convergence.
TemperatureHistory run_transient(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                                 const SimParams& params);

/// Trilinear in space, linear in time. Throws MeshError outside the mesh or window.
double probe(const TemperatureHistory& history, const VoxelMesh& mesh, Vec3 point, double time);

/// Volume mean over crystal elements of the element-mean nodal temperature.
double crystal_mean_temperature(const VoxelMesh& mesh, std::span<const double> field);

/// Element temperature as the mean of its 8 nodal values.
double element_temperature(const VoxelMesh& mesh, std::span<const double> field, std::int32_t element);

}  // namespace ovsim
