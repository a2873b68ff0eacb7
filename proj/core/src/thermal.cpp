#include "ovsim/thermal.hpp"

#include <algorithm>
#include <cmath>

#include "ovsim/error.hpp"
#include "ovsim/fem.hpp"
#include "ovsim/linear_solver.hpp"

namespace ovsim {
namespace {

// Local nodes lying on each element face (side order -x, +x, -y, +y, -z, +z).
std::array<int, 4> face_nodes(int side) {
  const int axis = side / 2;
  const int bit = side % 2;
  std::array<int, 4> out{};
  int n = 0;
  for (int l = 0; l < 8; ++l) {
    if (((l >> axis) & 1) == bit) out[n++] = l;
  }
  return out;
}

}  // namespace

TemperatureHistory run_transient(const VoxelMesh& mesh, std::span<const NamedMaterial> materials,
                                 const SimParams& params) {
  if (!(params.t_step > 0.0) || params.t_step > params.t_total) {
    throw SolverError("step/total mismatch: t_step must lie in (0, t_total]");
  }
  const double steps_real = params.t_total / params.t_step;
  const long steps = std::lround(steps_real);
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6) {
    throw SolverError("step/total mismatch: t_step does not divide t_total");
  }

  const int n = static_cast<int>(mesh.active_node_count());
  const double h = mesh.spacing;
  const double dt = params.t_step;

  // Fixed-temperature nodes.
  std::vector<char> fixed(n, 0);
  for (const Face& f : mesh.heater_base) {
    const auto nodes = mesh.element_nodes(f.element);
    for (int l : face_nodes(f.side)) fixed[mesh.node_index[nodes[l]]] = 1;
  }
  std::vector<int> free_index(n, -1);
  int n_free = 0;
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) free_index[i] = n_free++;
  }

  // Lumped capacity and convective film per node; conduction triplets.
  std::vector<double> capacity(n, 0.0);
  std::vector<double> film(n, 0.0);
  std::vector<Eigen::Triplet<double>> free_trip;
  std::vector<Eigen::Triplet<double>> coupling_trip;  // free rows, fixed columns
  std::vector<Eigen::Triplet<double>> full_trip;
  const fem::Matrix8& lap = fem::laplacian();
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    const auto mat = mesh.material[e];
    if (mat == kVoid) continue;
    const auto& m = materials[mat].props;
    const auto nodes = mesh.element_nodes(e);
    int idx[8];
    for (int l = 0; l < 8; ++l) idx[l] = mesh.node_index[nodes[l]];
    const double cap = m.density * m.specific_heat * h * h * h / 8.0;
    const double kh = m.conductivity * h;
    for (int a = 0; a < 8; ++a) {
      capacity[idx[a]] += cap;
      for (int b = 0; b < 8; ++b) {
        const double v = kh * lap(a, b);
        full_trip.emplace_back(idx[a], idx[b], v);
        const int ra = free_index[idx[a]];
        if (ra < 0) continue;
        const int cb = free_index[idx[b]];
        if (cb >= 0) {
          free_trip.emplace_back(ra, cb, v);
        } else {
          coupling_trip.emplace_back(ra, idx[b], v);
        }
      }
    }
  }
  for (const Face& f : mesh.convective_exterior) {
    const auto nodes = mesh.element_nodes(f.element);
    for (int l : face_nodes(f.side)) film[mesh.node_index[nodes[l]]] += params.convection_h * h * h / 4.0;
  }
  for (int i = 0; i < n; ++i) {
    const int r = free_index[i];
    if (r >= 0) free_trip.emplace_back(r, r, capacity[i] / dt + film[i]);
  }

  SparseMatrix A(n_free, n_free);
  A.setFromTriplets(free_trip.begin(), free_trip.end());
  SparseMatrix coupling(n_free, n);
  coupling.setFromTriplets(coupling_trip.begin(), coupling_trip.end());
  SparseMatrix K(n, n);
  K.setFromTriplets(full_trip.begin(), full_trip.end());

  TemperatureHistory history;
  history.ambient_T = params.ambient_T;
  history.heater_T = params.heater_T;

  // Work with the excess temperature theta = T - T_ambient.
  const double theta_heater = params.heater_T - params.ambient_T;
  // The snapshot at t = 0 is the uniform initial state; the heater setpoint acts from the
  // first step on (idealized instantaneous switch-on).
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd boundary = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) boundary[i] = theta_heater;
  }
  auto store = [&](double t) {
    history.times.push_back(t);
    std::vector<double> T(n);
    for (int i = 0; i < n; ++i) T[i] = params.ambient_T + theta[i];
    history.fields.push_back(std::move(T));
  };
  store(0.0);

  const Eigen::VectorXd dirichlet_load = coupling * boundary;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_free);
  Eigen::VectorXd rhs(n_free);
  // Iteration error must stay far below the 1e-9 K maximum-principle margin; the looser
  // mechanics tolerance would leave ~1e-6 K undershoot next to the ITO slabs.
  const double tol = std::min(params.solver_rel_tol, 1e-13);
  for (long step = 1; step <= steps; ++step) {
    for (int i = 0; i < n; ++i) {
      const int r = free_index[i];
      if (r >= 0) rhs[r] = capacity[i] / dt * theta[i];
    }
    rhs -= dirichlet_load;
    const SolveReport rep = solve_spd(A, rhs, x, tol);

    Eigen::VectorXd next = boundary;
    for (int i = 0; i < n; ++i) {
      if (free_index[i] >= 0) next[i] = x[free_index[i]];
    }

    StepEnergy energy;
    energy.iterations = rep.iterations;
    const Eigen::VectorXd k_theta = K * next;
    for (int i = 0; i < n; ++i) {
      const double dT = next[i] - theta[i];
      energy.stored_change += capacity[i] * dT;
      energy.convective_loss += dt * film[i] * next[i];
      if (fixed[i]) energy.heater_inflow += dt * (capacity[i] * dT / dt + k_theta[i] + film[i] * next[i]);
    }
    history.steps.push_back(energy);

    theta = std::move(next);
    store(static_cast<double>(step) * dt);
  }
  return history;
}

double element_temperature(const VoxelMesh& mesh, std::span<const double> field, std::int32_t element) {
  double sum = 0.0;
  for (auto g : mesh.element_nodes(element)) sum += field[mesh.node_index[g]];
  return sum / 8.0;
}

double crystal_mean_temperature(const VoxelMesh& mesh, std::span<const double> field) {
  double sum = 0.0;
  long count = 0;
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.material.size()); ++e) {
    if (mesh.material[e] != mesh.crystal_material) continue;
    sum += element_temperature(mesh, field, e);
    ++count;
  }
  if (count == 0) throw MeshError("mesh has no crystal elements");
  return sum / static_cast<double>(count);
}

double probe(const TemperatureHistory& history, const VoxelMesh& mesh, Vec3 point, double time) {
  if (history.times.empty()) throw MeshError("empty temperature history");
  const double t0 = history.times.front();
  const double t1 = history.times.back();
  if (!(time >= t0 && time <= t1)) throw MeshError("probe time outside the simulated window");

  const double h = mesh.spacing;
  int cell[3];
  double frac[3];
  const int dims[3] = {mesh.nx, mesh.ny, mesh.nz};
  for (int a = 0; a < 3; ++a) {
    const double u = (point[a] - mesh.origin[a]) / h;
    if (u < -1e-9 || u > dims[a] + 1e-9) throw MeshError("probe point outside the mesh");
    int c = static_cast<int>(std::floor(u));
    c = std::clamp(c, 0, dims[a] - 1);
    cell[a] = c;
    frac[a] = std::clamp(u - c, 0.0, 1.0);
  }
  // Prefer a solid element among those touching the point.
  std::int32_t element = -1;
  for (int dk = 0; dk <= 1 && element < 0; ++dk)
    for (int dj = 0; dj <= 1 && element < 0; ++dj)
      for (int di = 0; di <= 1 && element < 0; ++di) {
        int c[3] = {cell[0], cell[1], cell[2]};
        double f[3] = {frac[0], frac[1], frac[2]};
        const int d[3] = {di, dj, dk};
        bool ok = true;
        for (int a = 0; a < 3; ++a) {
          if (!d[a]) continue;
          if (f[a] == 0.0 && c[a] > 0) {
            --c[a];
            f[a] = 1.0;
          } else {
            ok = false;
          }
        }
        if (ok && mesh.is_solid(c[0], c[1], c[2])) {
          element = mesh.element_id(c[0], c[1], c[2]);
          for (int a = 0; a < 3; ++a) frac[a] = f[a];
        }
      }
  if (element < 0) throw MeshError("probe point outside the solid region");

  const auto nodes = mesh.element_nodes(element);
  std::size_t s = 0;
  while (s + 1 < history.times.size() && history.times[s + 1] < time) ++s;
  const std::size_t s1 = std::min(s + 1, history.times.size() - 1);
  const double span = history.times[s1] - history.times[s];
  const double wt = span > 0.0 ? (time - history.times[s]) / span : 0.0;

  auto at = [&](std::size_t snap) {
    // Weighted differences from the first node keep uniform fields exact.
    const auto& f = history.fields[snap];
    const double base = f[mesh.node_index[nodes[0]]];
    double acc = 0.0;
    for (int l = 1; l < 8; ++l) {
      const double w = ((l & 1) ? frac[0] : 1.0 - frac[0]) * (((l >> 1) & 1) ? frac[1] : 1.0 - frac[1]) *
                       (((l >> 2) & 1) ? frac[2] : 1.0 - frac[2]);
      acc += w * (f[mesh.node_index[nodes[l]]] - base);
    }
    return base + acc;
  };
  const double a = at(s);
  if (wt == 0.0) return a;
  const double b = at(s1);
  return a + wt * (b - a);
}

}  // namespace ovsim
