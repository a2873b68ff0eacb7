#include "ovsim/mechanics.hpp"

#include <Eigen/SparseCore>
#include <cmath>

#include "ovsim/error.hpp"
#include "ovsim/fem.hpp"
#include "ovsim/multigrid.hpp"

namespace ovsim {

namespace {

using Sparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Grid nodes to constrain, as (grid node, component mask bits x=1, y=2, z=4).
std::vector<std::pair<std::int32_t, int>> support_nodes(const VoxelMesh& mesh, Support support) {
  std::vector<std::pair<std::int32_t, int>> out;
  if (support == Support::clamp_all) {
    for (const Face& f : mesh.exterior_faces()) {
      const auto nodes = mesh.element_nodes(f.element);
      const int axis = f.side / 2, bit = f.side % 2;
      for (int l = 0; l < 8; ++l) {
        if (((l >> axis) & 1) == bit) out.emplace_back(nodes[l], 7);
      }
    }
    return out;
  }

  auto active = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i > mesh.nx || j > mesh.ny || k > mesh.nz) return false;
    return mesh.node_index[mesh.grid_node_id(i, j, k)] >= 0;
  };
  // Farthest active node along +x (or +y) from a given node in the same grid line.
  auto far_along = [&](std::array<int, 3> p, int axis) -> std::int32_t {
    const int limit = axis == 0 ? mesh.nx : mesh.ny;
    for (int s = limit; s > p[axis]; --s) {
      std::array<int, 3> q = p;
      q[axis] = s;
      if (active(q[0], q[1], q[2])) return mesh.grid_node_id(q[0], q[1], q[2]);
    }
    return -1;
  };

  if (!mesh.heater_base.empty()) {
    std::int32_t anchor = -1;
    for (const Face& f : mesh.heater_base) {
      const auto nodes = mesh.element_nodes(f.element);
      for (int l = 0; l < 4; ++l) {  // -z face holds local nodes 0..3
        out.emplace_back(nodes[l], 4);
        if (anchor < 0 || nodes[l] < anchor) anchor = nodes[l];
      }
    }
    const std::int32_t lateral = far_along(mesh.node_ijk(anchor), 0);
    if (lateral < 0) throw SolverError("singular system: heater base too small to pin rigid rotation");
    out.emplace_back(anchor, 7);
    out.emplace_back(lateral, 2);
    return out;
  }

  // Free body: classic 3-2-1 pins at the first active node.
  const std::int32_t anchor = mesh.active_nodes.front();
  const auto p = mesh.node_ijk(anchor);
  const std::int32_t bx = far_along(p, 0);
  const std::int32_t cy = far_along(p, 1);
  if (bx < 0 || cy < 0) throw SolverError("singular system: cannot remove rigid-body modes");
  out.emplace_back(anchor, 7);
  out.emplace_back(bx, 6);
  out.emplace_back(cy, 4);
  return out;
}

}  // namespace

struct ThermoelasticSolver::Impl {
  const VoxelMesh* mesh = nullptr;
  std::vector<NamedMaterial> materials;
  std::vector<int> dof_map;  // global dof -> free index or -1
  int n_free = 0;
  double rel_tol = 1e-9;
  Sparse K;
  std::unique_ptr<MultigridSolver> mg;
  mutable double last_residual = 0.0;
  mutable int last_iterations = 0;
};

ThermoelasticSolver::ThermoelasticSolver(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                                         Support support, double rel_tol)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.mesh = &mesh;
  s.materials.assign(materials.begin(), materials.end());
  s.rel_tol = rel_tol;

  const int n_nodes = static_cast<int>(mesh.active_node_count());
  if (n_nodes == 0) throw SolverError("singular system: empty mesh");
  std::vector<char> fixed(3 * static_cast<std::size_t>(n_nodes), 0);
  for (const auto& [grid, mask] : support_nodes(mesh, support)) {
    const int c = mesh.node_index[grid];
    for (int d = 0; d < 3; ++d) {
      if (mask & (1 << d)) fixed[3 * c + d] = 1;
    }
  }
  s.dof_map.assign(fixed.size(), -1);
  for (std::size_t d = 0; d < fixed.size(); ++d) {
    if (!fixed[d]) s.dof_map[d] = s.n_free++;
  }

  const double h = mesh.spacing;
  const fem::Matrix24& kl = fem::stiffness_lambda();
  const fem::Matrix24& km = fem::stiffness_mu();
  Sparse lower(s.n_free, s.n_free);
  lower.reserve(Eigen::VectorXi::Constant(s.n_free, 81));
  int dofs[24];
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    const auto mat = mesh.material[e];
    if (mat == kVoid) continue;
    const auto& m = s.materials[mat].props;
    const fem::Lame lm = fem::lame(m.youngs, m.poisson);
    const auto nodes = mesh.element_nodes(e);
    for (int l = 0; l < 8; ++l) {
      const int c = mesh.node_index[nodes[l]];
      for (int d = 0; d < 3; ++d) dofs[3 * l + d] = s.dof_map[3 * c + d];
    }
    for (int b = 0; b < 24; ++b) {
      const int col = dofs[b];
      if (col < 0) continue;
      for (int a = 0; a < 24; ++a) {
        const int row = dofs[a];
        if (row < col) continue;
        lower.coeffRef(row, col) += h * (lm.lambda * kl(a, b) + lm.mu * km(a, b));
      }
    }
  }
  lower.makeCompressed();
  s.K = lower.selfadjointView<Eigen::Lower>();

  std::vector<GridDof> grid_dofs(static_cast<std::size_t>(s.n_free));
  for (std::size_t d = 0; d < s.dof_map.size(); ++d) {
    if (s.dof_map[d] < 0) continue;
    const auto ijk = mesh.node_ijk(mesh.active_nodes[d / 3]);
    grid_dofs[s.dof_map[d]] = {ijk[0], ijk[1], ijk[2], static_cast<int>(d % 3)};
  }
  s.mg = std::make_unique<MultigridSolver>(s.K, grid_dofs, std::array<int, 3>{mesh.nx + 1, mesh.ny + 1, mesh.nz + 1});
}

ThermoelasticSolver::~ThermoelasticSolver() = default;
ThermoelasticSolver::ThermoelasticSolver(ThermoelasticSolver&&) noexcept = default;
ThermoelasticSolver& ThermoelasticSolver::operator=(ThermoelasticSolver&&) noexcept = default;

std::size_t ThermoelasticSolver::free_dof_count() const { return static_cast<std::size_t>(impl_->n_free); }
double ThermoelasticSolver::last_residual() const { return impl_->last_residual; }
int ThermoelasticSolver::last_iterations() const { return impl_->last_iterations; }
int ThermoelasticSolver::level_count() const { return impl_->mg->level_count(); }

DisplacementField ThermoelasticSolver::solve(std::span<const double> temperature, double reference_T,
                                             const DisplacementField* guess) const {
  const Impl& s = *impl_;
  const VoxelMesh& mesh = *s.mesh;
  if (temperature.size() != mesh.active_node_count()) {
    throw SolverError("temperature field size does not match the mesh");
  }
  const double h = mesh.spacing;
  const fem::Matrix24x8& g = fem::thermal_load();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(s.n_free);
  Eigen::Matrix<double, 8, 1> dT;
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    const auto mat = mesh.material[e];
    if (mat == kVoid) continue;
    const auto& m = s.materials[mat].props;
    const fem::Lame lm = fem::lame(m.youngs, m.poisson);
    const auto nodes = mesh.element_nodes(e);
    bool any = false;
    for (int l = 0; l < 8; ++l) {
      dT[l] = temperature[mesh.node_index[nodes[l]]] - reference_T;
      any = any || dT[l] != 0.0;
    }
    if (!any || m.thermal_expansion == 0.0) continue;
    const Eigen::Matrix<double, 24, 1> fe =
        (h * h * (3.0 * lm.lambda + 2.0 * lm.mu) * m.thermal_expansion) * (g * dT);
    for (int l = 0; l < 8; ++l) {
      const int c = mesh.node_index[nodes[l]];
      for (int d = 0; d < 3; ++d) {
        const int r = s.dof_map[3 * c + d];
        if (r >= 0) f[r] += fe[3 * l + d];
      }
    }
  }

  DisplacementField out;
  out.u.assign(3 * mesh.active_node_count(), 0.0);
  if (f.squaredNorm() == 0.0) {
    s.last_residual = 0.0;
    s.last_iterations = 0;
    return out;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(s.n_free);
  if (guess != nullptr && guess->u.size() == out.u.size()) {
    for (std::size_t d = 0; d < s.dof_map.size(); ++d) {
      if (s.dof_map[d] >= 0) x[s.dof_map[d]] = guess->u[d];
    }
  }
  const SolveReport rep = s.mg->solve(f, x, s.rel_tol);
  s.last_residual = rep.relative_residual;
  s.last_iterations = rep.iterations;
  for (std::size_t d = 0; d < s.dof_map.size(); ++d) {
    if (s.dof_map[d] >= 0) out.u[d] = x[s.dof_map[d]];
  }
  return out;
}

DisplacementField solve_thermoelastic(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                                      std::span<const double> temperature, double reference_T,
                                      Support support) {
  return ThermoelasticSolver(mesh, materials, support).solve(temperature, reference_T);
}

StressField recover_stress(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                           const DisplacementField& displacement, std::span<const double> temperature,
                           double reference_T) {
  if (displacement.u.size() != 3 * mesh.active_node_count() || temperature.size() != mesh.active_node_count()) {
    throw MeshError("field size does not match the mesh");
  }
  const double h = mesh.spacing;
  const fem::Matrix6x24& bc = fem::centroid_strain();
  StressField out;
  out.stress.assign(mesh.material.size(), SymTensor{});
  out.strain.assign(mesh.material.size(), SymTensor{});
  Eigen::Matrix<double, 24, 1> ue;
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    const auto mat = mesh.material[e];
    if (mat == kVoid) continue;
    const auto& m = materials[mat].props;
    const fem::Lame lm = fem::lame(m.youngs, m.poisson);
    const auto nodes = mesh.element_nodes(e);
    double tc = 0.0;
    for (int l = 0; l < 8; ++l) {
      const int c = mesh.node_index[nodes[l]];
      for (int d = 0; d < 3; ++d) ue[3 * l + d] = displacement.u[3 * c + d];
      tc += temperature[c];
    }
    tc /= 8.0;
    // Engineering strain (xx, yy, zz, xy, yz, xz).
    const Eigen::Matrix<double, 6, 1> eps = bc * ue / h;
    const double eth = m.thermal_expansion * (tc - reference_T);
    const double tr = eps[0] + eps[1] + eps[2] - 3.0 * eth;
    SymTensor& st = out.stress[e];
    for (int d = 0; d < 3; ++d) st.c[d] = lm.lambda * tr + 2.0 * lm.mu * (eps[d] - eth);
    for (int d = 3; d < 6; ++d) st.c[d] = lm.mu * eps[d];
    SymTensor& sn = out.strain[e];
    for (int d = 0; d < 3; ++d) sn.c[d] = eps[d];
    for (int d = 3; d < 6; ++d) sn.c[d] = 0.5 * eps[d];
  }
  return out;
}

double von_mises(const SymTensor& s) {
  const double a = s.c[0] - s.c[1], b = s.c[1] - s.c[2], c = s.c[2] - s.c[0];
  const double shear = s.c[3] * s.c[3] + s.c[4] * s.c[4] + s.c[5] * s.c[5];
  return std::sqrt(0.5 * (a * a + b * b + c * c) + 3.0 * shear);
}

std::vector<SymTensor> stress_along_path(const StressField& field, const PathSamples& samples) {
  std::vector<SymTensor> out;
  out.reserve(samples.sections.size());
  for (const PathSection& sec : samples.sections) {
    SymTensor acc;
    for (const auto& cell : sec.cells) {
      if (cell.element < 0 || static_cast<std::size_t>(cell.element) >= field.stress.size()) {
        throw MeshError("section outside field");
      }
      for (int d = 0; d < 6; ++d) acc.c[d] += cell.weight * field.stress[cell.element].c[d];
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace ovsim
