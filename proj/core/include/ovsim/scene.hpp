#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovsim/types.hpp"

namespace ovsim {

/// Thermal and mechanical constants of one material, SI units.
struct MaterialProps {
  double density = 0.0;            // kg/m^3
  double specific_heat = 0.0;      // J/(kg K)
  double poisson = 0.0;            // -
  double youngs = 0.0;             // Pa
  double thermal_expansion = 0.0;  // 1/K
  double conductivity = 0.0;       // W/(m K)
  double rel_permittivity = 1.0;   // -

  friend bool operator==(const MaterialProps&, const MaterialProps&) = default;
};

struct NamedMaterial {
  std::string name;
  MaterialProps props;

  friend bool operator==(const NamedMaterial&, const NamedMaterial&) = default;
};

/// Optical constants of the active electro-optic crystal.
struct OpticalProps {
  std::string crystal;           // material name of the active crystal
  double base_index = 0.0;       // n0
  double q11 = 0.0;              // m^2/N
  double q12 = 0.0;              // m^2/N
  double q44 = 0.0;              // m^2/N
  double r41 = 0.0;              // m/V
  double rel_permittivity = 0.0; // taken from the crystal material
  double wavelength = 976e-9;    // m

  friend bool operator==(const OpticalProps&, const OpticalProps&) = default;
};

enum class Shape : std::uint8_t { box, cylinder };

/// Box: origin is the minimum corner, extents are edge lengths.
/// Cylinder: origin is the center of the base disc; the axis is +z.
struct Primitive {
  std::string name;
  Shape shape = Shape::box;
  std::string material;
  Vec3 origin;
  Vec3 extents;          // box only
  double radius = 0.0;   // cylinder only
  double height = 0.0;   // cylinder only
  bool heater = false;

  bool contains(Vec3 p) const;
  Vec3 lower() const;
  Vec3 upper() const;

  friend bool operator==(const Primitive&, const Primitive&) = default;
};

struct OpticalPath {
  Vec3 entry;
  Vec3 direction{1.0, 0.0, 0.0};
  double length = 0.0;

  Vec3 exit() const { return entry + length * direction; }

  friend bool operator==(const OpticalPath&, const OpticalPath&) = default;
};

struct GeometrySpec {
  std::vector<Primitive> primitives;  // later entries win on overlap
  OpticalPath path;

  friend bool operator==(const GeometrySpec&, const GeometrySpec&) = default;
};

enum class ElectrodeKind : std::uint8_t { metal, transparent };

/// Electrode pair attached to the crystal. ratio_x is the run (mm) along x on the
/// y-normal faces, ratio_y the run (mm) along y on the x-normal faces. Terminal A
/// sits at the (-x, +y) crystal corner, terminal B at (+x, -y).
struct ElectrodeMode {
  std::string name;
  ElectrodeKind kind = ElectrodeKind::metal;
  std::string material;           // bulk material of the electrode layer
  double ratio_x = 0.0;           // mm
  double ratio_y = 0.0;           // mm
  double thickness = 0.0;         // m
  double applied_voltage = 1e3;   // V, terminal A at +V/2, B at -V/2

  friend bool operator==(const ElectrodeMode&, const ElectrodeMode&) = default;
};

struct SimParams {
  double t_total = 60.0;
  double t_step = 5.0;
  double ambient_T = 300.0;
  double heater_T = 358.0;
  double convection_h = 10.0;
  double reference_T = 300.0;
  double mesh_resolution = 1e-3;
  double solver_rel_tol = 1e-9;
  double tau_ref = 60.0;              // s, drift normalization reference
  std::int64_t max_elements = 20'000'000;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct Scene {
  std::vector<NamedMaterial> materials;
  OpticalProps optics;
  GeometrySpec geometry;
  std::optional<ElectrodeMode> electrode;  // absent: bare crystal, no electrostatics
  SimParams sim;

  /// Index of a material by name, or -1.
  int material_index(std::string_view name) const;
  const MaterialProps& material(std::string_view name) const;
  /// The unique primitive made of the optical crystal.
  const Primitive& crystal() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Parses configuration text into a fully populated Scene (defaults applied, unknown
/// keys rejected, invariants enforced). Throws ConfigError.
Scene parse_config(std::string_view text);

/// Same as parse_config, after applying OVSIM__section__key overrides (see
/// config::apply_overrides); pass config::environment_with_prefix("OVSIM").
Scene parse_config(std::string_view text, const std::map<std::string, std::string>& overrides);

/// Canonical text form; parse_config(serialize(s)) == s.
std::string serialize(const Scene& scene);

/// Stable 64-bit FNV-1a hash of the canonical text, as 16 hex digits.
std::string config_hash(const Scene& scene);

/// One of the six built-in electrode modes: "Cu 10:0", "Cu 5:2", "Cu 5:4", "ITO 0:5",
/// "ITO 0:7", "ITO 0:10" (or the ids cu_10_0, ..., ito_0_10). Throws ConfigError.
ElectrodeMode builtin_mode(std::string_view name);

/// Ids of the built-in modes, in table order.
const std::vector<std::string>& builtin_mode_ids();

/// Identifier form of a mode name: "Cu 5:4" -> "cu_5_4".
std::string mode_id(std::string_view name);

/// The default scene document (reference materials, stacked heater/support/crystal)
/// with the given built-in mode.
std::string default_config_text(std::string_view mode = "cu_10_0");

struct Diagnostic {
  std::string field;
  std::string message;
};

/// Empty iff every invariant holds.
std::vector<Diagnostic> validate(const Scene& scene);

/// Electrode layers generated for the scene's mode around the crystal primitive.
struct ElectrodeBox {
  Vec3 lower;
  Vec3 upper;
  int terminal = 0;  // 0 = A (+V/2), 1 = B (-V/2)
};

/// Axis-aligned electrode boxes for the mode, with each layer at least `layer_thickness`
/// thick (the voxelizer passes its layer-rounded thickness).
std::vector<ElectrodeBox> electrode_boxes(const Scene& scene, double layer_thickness);

}  // namespace ovsim
