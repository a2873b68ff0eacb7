#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ovsim/mesh.hpp"
#include "ovsim/scene.hpp"
#include "ovsim/types.hpp"

namespace ovsim {

/// Nodal displacement (m), three components per compact node.
struct DisplacementField {
  std::vector<double> u;

  Vec3 at(std::size_t node) const { return {u[3 * node], u[3 * node + 1], u[3 * node + 2]}; }
};

/// Centroid stress (Pa) and strain per element. Void elements hold zeros.
/// Shear strain entries are tensor components (half the engineering shear).
struct StressField {
  std::vector<SymTensor> stress;
  std::vector<SymTensor> strain;
};

enum class Support {
  heater_base,  // heater base fixed vertically plus minimal in-plane pins
  clamp_all,    // every exterior node fixed
};

/// Assembles the stiffness and its multigrid hierarchy once; each snapshot is then one
/// preconditioned CG solve.
class ThermoelasticSolver {
 public:
  ThermoelasticSolver(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                      Support support = Support::heater_base, double rel_tol = 1e-9);
  ~ThermoelasticSolver();
  ThermoelasticSolver(ThermoelasticSolver&&) noexcept;
  ThermoelasticSolver& operator=(ThermoelasticSolver&&) noexcept;

  /// `guess` (e.g. the previous snapshot) only seeds the iteration. Throws SolverError
  /// if the residual does not reach the configured tolerance.
  DisplacementField solve(std::span<const double> temperature, double reference_T,
                          const DisplacementField* guess = nullptr) const;

  std::size_t free_dof_count() const;
  /// Relative residual and iteration count of the most recent solve.
  double last_residual() const;
  int last_iterations() const;
  int level_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DisplacementField solve_thermoelastic(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                                      std::span<const double> temperature, double reference_T,
                                      Support support = Support::heater_base);

StressField recover_stress(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                           const DisplacementField& displacement, std::span<const double> temperature,
                           double reference_T);

double von_mises(const SymTensor& s);

/// Weighted centroid stress per path section. Throws MeshError for a cell outside the field.
std::vector<SymTensor> stress_along_path(const StressField& field, const PathSamples& samples);

}  // namespace ovsim
