#pragma once

#include <span>
#include <vector>

#include "ovsim/mesh.hpp"
#include "ovsim/optics.hpp"
#include "ovsim/scene.hpp"

namespace ovsim {

/// Potential (V) per compact node and field (V/m) per element. Only crystal elements
/// and their nodes carry values; everything else is zero.
struct PotentialField {
  std::vector<double> potential;
  std::vector<Vec3> field;
  double applied_voltage = 0.0;
  int iterations = 0;
};

struct FieldSummary {
  double mean_angle = 0.0;  // degrees in [0, 90]
  Vec3 mean_field;          // length-weighted average over the path
  std::vector<Vec3> section_fields;
};

/// Laplace solve inside the crystal with the two electrode node sets held at +V/2 and
/// -V/2 and zero normal flux elsewhere. Throws SolverError for missing electrodes.
PotentialField solve_potential(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                               const ElectrodeMode& mode, double rel_tol = 1e-10);

/// Weighted element field per path section.
std::vector<Vec3> field_along_path(const PotentialField& field, const PathSamples& samples);

/// Angle between the length-weighted mean field and the propagation direction.
/// Throws SolverError for a vanishing mean field.
FieldSummary mean_field_angle(const PotentialField& field, const PathSamples& samples);

/// Linear electro-optic perturbation of a cubic (43m) crystal for a simulation-frame
/// field, rotated back into the simulation frame.
SymTensor electrooptic_deltaB(Vec3 E, const OpticalProps& optics, const TransformSet& transforms);

/// Voltage giving a modulation phase of pi, scaled linearly from the solved field's
/// applied voltage. Returns +infinity when the transverse retardation is below the
/// numeric floor (field parallel to the light).
double half_wave_voltage(const PotentialField& field, const PathSamples& samples, const OpticalProps& optics,
                         const TransformSet& transforms);

}  // namespace ovsim
