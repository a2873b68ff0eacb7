#include "ovsim/electrostatics.hpp"

#include <cmath>
#include <limits>

#include "ovsim/error.hpp"
#include "ovsim/fem.hpp"
#include "ovsim/linear_solver.hpp"

namespace ovsim {

PotentialField solve_potential(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                               const ElectrodeMode& mode, double rel_tol) {
  if (mesh.electrode_nodes[0].empty() || mesh.electrode_nodes[1].empty()) {
    throw SolverError("electrodes missing: both terminals need crystal contact");
  }
  const int n = static_cast<int>(mesh.active_node_count());
  const double half = 0.5 * mode.applied_voltage;

  // Unknowns: crystal nodes that are not electrode contacts.
  std::vector<signed char> role(n, -1);  // -1 outside, 0 free, 1/2 terminal A/B
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.material[e] != mesh.crystal_material) continue;
    for (auto g : mesh.element_nodes(e)) role[mesh.node_index[g]] = 0;
  }
  std::vector<double> value(n, 0.0);
  for (int t = 0; t < 2; ++t) {
    for (auto g : mesh.electrode_nodes[t]) {
      const int c = mesh.node_index[g];
      role[c] = static_cast<signed char>(1 + t);
      value[c] = t == 0 ? half : -half;
    }
  }
  std::vector<int> free_index(n, -1);
  int n_free = 0;
  for (int i = 0; i < n; ++i) {
    if (role[i] == 0) free_index[i] = n_free++;
  }

  const double h = mesh.spacing;
  const fem::Matrix8& lap = fem::laplacian();
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.material[e] != mesh.crystal_material) continue;
    const double eps = materials[mesh.material[e]].props.rel_permittivity * h;
    const auto nodes = mesh.element_nodes(e);
    int idx[8];
    for (int l = 0; l < 8; ++l) idx[l] = mesh.node_index[nodes[l]];
    for (int a = 0; a < 8; ++a) {
      const int r = free_index[idx[a]];
      if (r < 0) continue;
      for (int b = 0; b < 8; ++b) {
        const double v = eps * lap(a, b);
        const int c = free_index[idx[b]];
        if (c >= 0) {
          trip.emplace_back(r, c, v);
        } else {
          rhs[r] -= v * value[idx[b]];
        }
      }
    }
  }

  PotentialField out;
  out.applied_voltage = mode.applied_voltage;
  if (n_free > 0) {
    SparseMatrix A(n_free, n_free);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_free);
    const SolveReport rep = solve_spd(A, rhs, x, rel_tol);
    out.iterations = rep.iterations;
    for (int i = 0; i < n; ++i) {
      if (free_index[i] >= 0) value[i] = x[free_index[i]];
    }
  }
  out.potential = std::move(value);

  out.field.assign(mesh.material.size(), Vec3{});
  const fem::Matrix3x8& g = fem::centroid_gradient();
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.material[e] != mesh.crystal_material) continue;
    const auto nodes = mesh.element_nodes(e);
    Eigen::Matrix<double, 8, 1> phi;
    for (int l = 0; l < 8; ++l) phi[l] = out.potential[mesh.node_index[nodes[l]]];
    const Eigen::Vector3d grad = g * phi / h;
    out.field[e] = Vec3{-grad[0], -grad[1], -grad[2]};
  }
  return out;
}

std::vector<Vec3> field_along_path(const PotentialField& field, const PathSamples& samples) {
  std::vector<Vec3> out;
  out.reserve(samples.sections.size());
  for (const auto& sec : samples.sections) {
    Vec3 acc;
    for (const auto& cell : sec.cells) acc = acc + cell.weight * field.field[cell.element];
    out.push_back(acc);
  }
  return out;
}

FieldSummary mean_field_angle(const PotentialField& field, const PathSamples& samples) {
  FieldSummary s;
  s.section_fields = field_along_path(field, samples);
  Vec3 acc;
  double total = 0.0;
  for (std::size_t m = 0; m < samples.sections.size(); ++m) {
    acc = acc + samples.sections[m].length * s.section_fields[m];
    total += samples.sections[m].length;
  }
  if (total > 0.0) acc = (1.0 / total) * acc;
  s.mean_field = acc;
  const double mag = norm(acc);
  if (!(mag > 0.0)) throw SolverError("zero average field along the optical path");
  const double c = std::min(1.0, std::abs(dot(acc, samples.direction)) / mag);
  s.mean_angle = std::acos(c) * 180.0 / kPi;
  return s;
}

SymTensor electrooptic_deltaB(Vec3 E, const OpticalProps& optics, const TransformSet& transforms) {
  const Eigen::Vector3d es(E[0], E[1], E[2]);
  const Eigen::Vector3d ec = transforms.T * es;
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  b(1, 2) = b(2, 1) = optics.r41 * ec[0];
  b(0, 2) = b(2, 0) = optics.r41 * ec[1];
  b(0, 1) = b(1, 0) = optics.r41 * ec[2];
  // T is the simulation -> crystal map; it is symmetric and orthogonal, so T^-1 = T^T = T.
  const Eigen::Matrix3d bs = transforms.T.transpose() * b * transforms.T;
  SymTensor out;
  out.c = {bs(0, 0), bs(1, 1), bs(2, 2), bs(0, 1), bs(1, 2), bs(0, 2)};
  return out;
}

double half_wave_voltage(const PotentialField& field, const PathSamples& samples, const OpticalProps& optics,
                         const TransformSet& transforms) {
  const Axis axis = propagation_axis(samples.direction);
  const std::vector<Vec3> fields = field_along_path(field, samples);
  // Small-signal retardation adds as a vector at twice the axis angle.
  double rc = 0.0, rs = 0.0, scale = 0.0;
  const double n3 = optics.base_index * optics.base_index * optics.base_index;
  for (std::size_t m = 0; m < fields.size(); ++m) {
    const double L = samples.sections[m].length;
    const SectionBirefringence s = principal_birefringence(electrooptic_deltaB(fields[m], optics, transforms), axis,
                                                           optics.base_index, L, optics.wavelength);
    rc += s.delta * std::cos(2.0 * s.axis);
    rs += s.delta * std::sin(2.0 * s.axis);
    scale += 2.0 * kPi * L * n3 * std::abs(optics.r41) * norm(fields[m]) / optics.wavelength;
  }
  const double gamma = std::hypot(rc, rs);
  if (!(scale > 0.0) || gamma <= 1e-9 * scale) return std::numeric_limits<double>::infinity();
  return kPi * std::abs(field.applied_voltage) / gamma;
}

}  // namespace ovsim
