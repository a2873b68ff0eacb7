#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ovsim/electrostatics.hpp"
#include "ovsim/mechanics.hpp"
#include "ovsim/mesh.hpp"
#include "ovsim/optics.hpp"
#include "ovsim/scene.hpp"

namespace ovsim {

struct CurvePoint {
  double time = 0.0;       // s
  double crystal_T = 0.0;  // K, crystal volume mean
  double error = 0.0;      // I_out - 0.5

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct ModeResult {
  std::string name;  // mode id
  ElectrodeMode mode;
  double mean_angle = 0.0;  // degrees
  double hwv = 0.0;         // V; +inf when the field has no transverse component
  std::vector<CurvePoint> curve;
  double total_error = 0.0;      // range (max - min) of the error curve
  double corrected_total = 0.0;  // total_error rescaled to tau_ref

  friend bool operator==(const ModeResult&, const ModeResult&) = default;
};

/// Optional observers for intermediate fields (all called on the evaluating thread).
struct EvaluationHooks {
  std::function<void(const VoxelMesh&)> on_mesh;
  std::function<void(std::size_t snapshot, double time, const VoxelMesh&, std::span<const double> T)> on_temperature;
  std::function<void(std::size_t snapshot, double time, const VoxelMesh&, const StressField&)> on_stress;
  std::function<void(std::size_t snapshot, double time, std::span<const SectionBirefringence>)> on_sections;
  std::function<void(const VoxelMesh&, const PotentialField&, const FieldSummary&)> on_field;
};

/// Thermal -> mechanics -> optics per snapshot, electrostatics once. Solver failures are
/// rethrown as SolverError prefixed with the mode id.
ModeResult evaluate_mode(const Scene& scene, const ElectrodeMode& mode, const EvaluationHooks& hooks = {});

/// Electrostatics only: mean field angle and half-wave voltage.
struct FieldResult {
  std::string name;
  double mean_angle = 0.0;
  double hwv = 0.0;
  Vec3 mean_field;
};
FieldResult evaluate_field(const Scene& scene, const ElectrodeMode& mode, const EvaluationHooks& hooks = {});

struct TracePoint {
  double s = 0.0;  // family parameter in [0, 1]
  double ratio_x = 0.0;
  double ratio_y = 0.0;
  double objective = 0.0;  // corrected_total
};

struct SweepReport {
  std::vector<ModeResult> results;  // sorted by mode id
  std::vector<std::string> ranking;  // ids by ascending corrected_total, ties by id
  std::vector<TracePoint> trace;     // optimizer evaluations in grid order
  bool partial = false;              // a mode failed; results hold the completed ones
  std::string failure;
};

/// Evaluates the modes on up to `threads` workers; the report does not depend on the
/// thread count or on the input order.
SweepReport compare_modes(const Scene& scene, std::span<const ElectrodeMode> modes, int threads = 1);

enum class Family { cu, ito };

/// Family member at s in [0, 1]: copper runs (10, 0) -> (5, 2) -> (5, 4) piecewise
/// linearly, ITO runs (0, 5) -> (0, 10). Built-in ratios keep their built-in ids.
ElectrodeMode family_mode(Family family, double s);

/// n evenly spaced parameters 0, 1/(n-1), ..., 1 (n = 1 gives {0}).
std::vector<double> uniform_grid(int n);

struct OptimizeResult {
  ModeResult best;
  SweepReport report;
};

/// Grid search minimizing corrected_total; ties resolved toward the earlier grid point.
/// Throws SolverError if any evaluation fails or the grid is empty.
OptimizeResult optimize_ratio(const Scene& scene, Family family, std::span<const double> grid, int threads = 1);

}  // namespace ovsim
