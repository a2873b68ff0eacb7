#include "ovsim/scene.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "ovsim/config_text.hpp"
#include "ovsim/error.hpp"

namespace ovsim {
namespace {

using config::Document;
using config::Entry;
using config::Section;
using config::Value;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Reads keys of one section against a fixed schema. Key lookup is case-insensitive so
// that environment overrides (always lower case) hit mixed-case keys like heater_T.
class SectionReader {
 public:
  SectionReader(const Section& section, std::initializer_list<std::string_view> allowed)
      : section_(section) {
    for (auto k : allowed) allowed_.insert(lower(k));
    for (const auto& e : section.entries) {
      if (!allowed_.count(lower(e.key))) {
        throw ConfigError("unknown key '" + e.key + "' in [" + section.name + "]", e.line);
      }
    }
  }

  const Entry* find(std::string_view key) const {
    const std::string k = lower(key);
    for (const auto& e : section_.entries) {
      if (lower(e.key) == k) return &e;
    }
    return nullptr;
  }

  double number(std::string_view key) const {
    const Entry* e = require(key);
    if (const auto* v = std::get_if<double>(&e->value)) return *v;
    throw ConfigError(field(key) + " must be a number", e->line);
  }

  double number_or(std::string_view key, double fallback) const {
    return find(key) ? number(key) : fallback;
  }

  std::string text(std::string_view key) const {
    const Entry* e = require(key);
    if (const auto* v = std::get_if<std::string>(&e->value)) return *v;
    throw ConfigError(field(key) + " must be a quoted string", e->line);
  }

  bool flag_or(std::string_view key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (const auto* v = std::get_if<bool>(&e->value)) return *v;
    throw ConfigError(field(key) + " must be true or false", e->line);
  }

  Vec3 vec3(std::string_view key) const {
    const Entry* e = require(key);
    const auto* v = std::get_if<std::vector<double>>(&e->value);
    if (!v || v->size() != 3) throw ConfigError(field(key) + " must be a 3-element array", e->line);
    return {(*v)[0], (*v)[1], (*v)[2]};
  }

  Vec3 vec3_or(std::string_view key, Vec3 fallback) const { return find(key) ? vec3(key) : fallback; }

  std::string field(std::string_view key) const { return section_.name + "." + std::string(key); }

 private:
  const Entry* require(std::string_view key) const {
    if (const Entry* e = find(key)) return e;
    throw ConfigError("missing required key '" + std::string(key) + "' in [" + section_.name + "]",
                      section_.line);
  }

  const Section& section_;
  std::set<std::string> allowed_;
};

struct ModeRow {
  const char* id;
  const char* name;
  ElectrodeKind kind;
  const char* material;
  double ratio_x;
  double ratio_y;
  double thickness;
};

// Copper foil is 0.5 mm; ITO electrodes are 1 mm fused-silica slabs.
constexpr ModeRow kModes[] = {
    {"cu_10_0", "Cu 10:0", ElectrodeKind::metal, "cu", 10.0, 0.0, 0.5e-3},
    {"cu_5_2", "Cu 5:2", ElectrodeKind::metal, "cu", 5.0, 2.0, 0.5e-3},
    {"cu_5_4", "Cu 5:4", ElectrodeKind::metal, "cu", 5.0, 4.0, 0.5e-3},
    {"ito_0_5", "ITO 0:5", ElectrodeKind::transparent, "sio2", 0.0, 5.0, 1e-3},
    {"ito_0_7", "ITO 0:7", ElectrodeKind::transparent, "sio2", 0.0, 7.0, 1e-3},
    {"ito_0_10", "ITO 0:10", ElectrodeKind::transparent, "sio2", 0.0, 10.0, 1e-3},
};

ElectrodeKind parse_kind(const std::string& s, int line) {
  if (s == "metal") return ElectrodeKind::metal;
  if (s == "transparent") return ElectrodeKind::transparent;
  throw ConfigError("electrode.kind must be \"metal\" or \"transparent\"", line);
}

const char* kind_name(ElectrodeKind k) { return k == ElectrodeKind::metal ? "metal" : "transparent"; }

bool near_integer(double v, double tol = 1e-6) { return std::abs(v - std::round(v)) <= tol; }

Scene build_scene(const Document& doc) {
  Scene scene;

  std::set<std::string> known_prefix = {"simulation", "optics", "path", "electrode"};
  bool any_primitive = false;
  for (const auto& s : doc.sections) {
    if (s.name.rfind("primitive.", 0) == 0) {
      any_primitive = true;
    } else if (s.name.rfind("materials.", 0) != 0 && !known_prefix.count(s.name)) {
      throw ConfigError("unknown section [" + s.name + "]", s.line);
    }
  }
  if (!any_primitive) throw ConfigError("missing geometry: no [primitive.*] sections");

  for (const auto& s : doc.sections) {
    if (s.name.rfind("materials.", 0) != 0) continue;
    SectionReader r(s, {"density", "specific_heat", "poisson", "youngs", "thermal_expansion", "conductivity",
                        "rel_permittivity"});
    MaterialProps m;
    m.density = r.number("density");
    m.specific_heat = r.number("specific_heat");
    m.poisson = r.number("poisson");
    m.youngs = r.number("youngs");
    m.thermal_expansion = r.number("thermal_expansion");
    m.conductivity = r.number("conductivity");
    m.rel_permittivity = r.number_or("rel_permittivity", 1.0);
    scene.materials.push_back({s.name.substr(std::string("materials.").size()), m});
  }

  const Section* optics = doc.find("optics");
  if (!optics) throw ConfigError("missing section [optics]");
  {
    SectionReader r(*optics, {"crystal", "base_index", "q11", "q12", "q44", "r41", "wavelength"});
    scene.optics.crystal = r.text("crystal");
    scene.optics.base_index = r.number("base_index");
    scene.optics.q11 = r.number("q11");
    scene.optics.q12 = r.number_or("q12", 0.0);
    scene.optics.q44 = r.number("q44");
    scene.optics.r41 = r.number("r41");
    scene.optics.wavelength = r.number_or("wavelength", 976e-9);
    const int idx = scene.material_index(scene.optics.crystal);
    if (idx < 0) throw ConfigError("optics.crystal names unknown material '" + scene.optics.crystal + "'");
    scene.optics.rel_permittivity = scene.materials[idx].props.rel_permittivity;
  }

  for (const auto& s : doc.sections) {
    if (s.name.rfind("primitive.", 0) != 0) continue;
    SectionReader r(s, {"shape", "material", "origin", "extents", "radius", "height", "heater"});
    Primitive p;
    p.name = s.name.substr(std::string("primitive.").size());
    const std::string shape = r.text("shape");
    p.material = r.text("material");
    p.origin = r.vec3("origin");
    p.heater = r.flag_or("heater", false);
    if (shape == "box") {
      p.shape = Shape::box;
      p.extents = r.vec3("extents");
      if (r.find("radius") || r.find("height")) throw ConfigError("box primitive takes extents only", s.line);
    } else if (shape == "cylinder") {
      p.shape = Shape::cylinder;
      p.radius = r.number("radius");
      p.height = r.number("height");
      if (r.find("extents")) throw ConfigError("cylinder primitive takes radius/height only", s.line);
    } else {
      throw ConfigError(r.field("shape") + " must be \"box\" or \"cylinder\"", s.line);
    }
    if (scene.material_index(p.material) < 0) {
      throw ConfigError(r.field("material") + " names unknown material '" + p.material + "'", s.line);
    }
    scene.geometry.primitives.push_back(p);
  }

  const Section* path = doc.find("path");
  if (!path) throw ConfigError("missing section [path]");
  {
    SectionReader r(*path, {"entry", "direction", "length"});
    scene.geometry.path.entry = r.vec3("entry");
    Vec3 d = r.vec3_or("direction", {1.0, 0.0, 0.0});
    const double n = norm(d);
    if (!(n > 0.0)) throw ConfigError("path.direction must be nonzero", path->line);
    if (std::abs(n - 1.0) > 1e-15) d = (1.0 / n) * d;
    scene.geometry.path.direction = d;
    scene.geometry.path.length = r.number("length");
  }

  if (const Section* el = doc.find("electrode")) {
    SectionReader r(*el, {"mode", "name", "kind", "material", "ratio_x", "ratio_y", "thickness", "applied_voltage"});
    ElectrodeMode m;
    if (r.find("mode")) {
      m = builtin_mode(r.text("mode"));
    } else {
      m.name = r.text("name");
      m.kind = parse_kind(r.text("kind"), el->line);
      m.material = r.text("material");
      m.ratio_x = r.number("ratio_x");
      m.ratio_y = r.number("ratio_y");
      m.thickness = r.number("thickness");
    }
    if (r.find("mode") && r.find("name")) m.name = r.text("name");
    if (r.find("mode") && r.find("kind")) m.kind = parse_kind(r.text("kind"), el->line);
    if (r.find("mode") && r.find("material")) m.material = r.text("material");
    if (r.find("mode") && r.find("ratio_x")) m.ratio_x = r.number("ratio_x");
    if (r.find("mode") && r.find("ratio_y")) m.ratio_y = r.number("ratio_y");
    if (r.find("mode") && r.find("thickness")) m.thickness = r.number("thickness");
    m.applied_voltage = r.number_or("applied_voltage", m.applied_voltage);
    if (scene.material_index(m.material) < 0) {
      throw ConfigError("electrode.material names unknown material '" + m.material + "'", el->line);
    }
    scene.electrode = m;
  }

  if (const Section* sim = doc.find("simulation")) {
    SectionReader r(*sim, {"t_total", "t_step", "ambient_T", "heater_T", "convection_h", "reference_T",
                           "mesh_resolution", "solver_rel_tol", "tau_ref", "max_elements"});
    SimParams& p = scene.sim;
    p.t_total = r.number_or("t_total", p.t_total);
    p.t_step = r.number_or("t_step", p.t_step);
    p.ambient_T = r.number_or("ambient_T", p.ambient_T);
    p.heater_T = r.number_or("heater_T", p.heater_T);
    p.convection_h = r.number_or("convection_h", p.convection_h);
    p.reference_T = r.number_or("reference_T", p.ambient_T);
    p.mesh_resolution = r.number_or("mesh_resolution", p.mesh_resolution);
    p.solver_rel_tol = r.number_or("solver_rel_tol", p.solver_rel_tol);
    p.tau_ref = r.number_or("tau_ref", p.t_total);
    const double cap = r.number_or("max_elements", static_cast<double>(p.max_elements));
    if (!(cap >= 1.0) || !near_integer(cap, 0.0)) throw ConfigError("simulation.max_elements must be a positive integer");
    p.max_elements = static_cast<std::int64_t>(cap);
  } else {
    scene.sim.reference_T = scene.sim.ambient_T;
    scene.sim.tau_ref = scene.sim.t_total;
  }

  return scene;
}

void check_material(std::vector<Diagnostic>& out, const NamedMaterial& nm) {
  const std::string f = "materials." + nm.name + ".";
  const auto& m = nm.props;
  auto positive = [&](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back({f + key, std::string(key) + " must be positive"});
  };
  positive(m.density, "density");
  positive(m.specific_heat, "specific_heat");
  positive(m.youngs, "youngs");
  positive(m.thermal_expansion, "thermal_expansion");
  positive(m.conductivity, "conductivity");
  positive(m.rel_permittivity, "rel_permittivity");
  if (!(m.poisson > 0.0 && m.poisson < 0.5)) out.push_back({f + "poisson", "poisson out of range (0, 0.5)"});
}

}  // namespace

bool Primitive::contains(Vec3 p) const {
  if (shape == Shape::box) {
    for (int a = 0; a < 3; ++a) {
      if (p[a] < origin[a] || p[a] > origin[a] + extents[a]) return false;
    }
    return true;
  }
  const double dx = p.x - origin.x;
  const double dy = p.y - origin.y;
  return dx * dx + dy * dy <= radius * radius && p.z >= origin.z && p.z <= origin.z + height;
}

Vec3 Primitive::lower() const {
  if (shape == Shape::box) return origin;
  return {origin.x - radius, origin.y - radius, origin.z};
}

Vec3 Primitive::upper() const {
  if (shape == Shape::box) return origin + extents;
  return {origin.x + radius, origin.y + radius, origin.z + height};
}

int Scene::material_index(std::string_view name) const {
  for (std::size_t i = 0; i < materials.size(); ++i) {
    if (materials[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const MaterialProps& Scene::material(std::string_view name) const {
  const int i = material_index(name);
  if (i < 0) throw ConfigError("unknown material '" + std::string(name) + "'");
  return materials[i].props;
}

const Primitive& Scene::crystal() const {
  const Primitive* found = nullptr;
  for (const auto& p : geometry.primitives) {
    if (p.material == optics.crystal) {
      if (found) throw ConfigError("more than one primitive is made of the crystal material");
      found = &p;
    }
  }
  if (!found) throw ConfigError("no primitive is made of the crystal material '" + optics.crystal + "'");
  if (found->shape != Shape::box) throw ConfigError("the crystal primitive must be a box");
  return *found;
}

Scene parse_config(std::string_view text) { return parse_config(text, {}); }

Scene parse_config(std::string_view text, const std::map<std::string, std::string>& overrides) {
  Document doc = config::parse_document(text);
  config::apply_overrides(doc, overrides, "OVSIM");
  Scene scene = build_scene(doc);
  const auto diags = validate(scene);
  if (!diags.empty()) throw ConfigError(diags.front().field + ": " + diags.front().message);
  return scene;
}

std::string serialize(const Scene& scene) {
  using config::format_number;
  auto vec = [](Vec3 v) {
    return "[" + format_number(v.x) + ", " + format_number(v.y) + ", " + format_number(v.z) + "]";
  };
  std::ostringstream out;
  const auto& s = scene.sim;
  out << "[simulation]\n"
      << "t_total = " << format_number(s.t_total) << "\n"
      << "t_step = " << format_number(s.t_step) << "\n"
      << "ambient_T = " << format_number(s.ambient_T) << "\n"
      << "heater_T = " << format_number(s.heater_T) << "\n"
      << "convection_h = " << format_number(s.convection_h) << "\n"
      << "reference_T = " << format_number(s.reference_T) << "\n"
      << "mesh_resolution = " << format_number(s.mesh_resolution) << "\n"
      << "solver_rel_tol = " << format_number(s.solver_rel_tol) << "\n"
      << "tau_ref = " << format_number(s.tau_ref) << "\n"
      << "max_elements = " << s.max_elements << "\n";
  for (const auto& m : scene.materials) {
    out << "\n[materials." << m.name << "]\n"
        << "density = " << format_number(m.props.density) << "\n"
        << "specific_heat = " << format_number(m.props.specific_heat) << "\n"
        << "poisson = " << format_number(m.props.poisson) << "\n"
        << "youngs = " << format_number(m.props.youngs) << "\n"
        << "thermal_expansion = " << format_number(m.props.thermal_expansion) << "\n"
        << "conductivity = " << format_number(m.props.conductivity) << "\n"
        << "rel_permittivity = " << format_number(m.props.rel_permittivity) << "\n";
  }
  const auto& o = scene.optics;
  out << "\n[optics]\n"
      << "crystal = \"" << o.crystal << "\"\n"
      << "base_index = " << format_number(o.base_index) << "\n"
      << "q11 = " << format_number(o.q11) << "\n"
      << "q12 = " << format_number(o.q12) << "\n"
      << "q44 = " << format_number(o.q44) << "\n"
      << "r41 = " << format_number(o.r41) << "\n"
      << "wavelength = " << format_number(o.wavelength) << "\n";
  for (const auto& p : scene.geometry.primitives) {
    out << "\n[primitive." << p.name << "]\n"
        << "shape = \"" << (p.shape == Shape::box ? "box" : "cylinder") << "\"\n"
        << "material = \"" << p.material << "\"\n"
        << "origin = " << vec(p.origin) << "\n";
    if (p.shape == Shape::box) {
      out << "extents = " << vec(p.extents) << "\n";
    } else {
      out << "radius = " << format_number(p.radius) << "\n"
          << "height = " << format_number(p.height) << "\n";
    }
    out << "heater = " << (p.heater ? "true" : "false") << "\n";
  }
  const auto& path = scene.geometry.path;
  out << "\n[path]\n"
      << "entry = " << vec(path.entry) << "\n"
      << "direction = " << vec(path.direction) << "\n"
      << "length = " << format_number(path.length) << "\n";
  if (scene.electrode) {
    const auto& e = *scene.electrode;
    out << "\n[electrode]\n"
        << "name = \"" << e.name << "\"\n"
        << "kind = \"" << kind_name(e.kind) << "\"\n"
        << "material = \"" << e.material << "\"\n"
        << "ratio_x = " << format_number(e.ratio_x) << "\n"
        << "ratio_y = " << format_number(e.ratio_y) << "\n"
        << "thickness = " << format_number(e.thickness) << "\n"
        << "applied_voltage = " << format_number(e.applied_voltage) << "\n";
  }
  return out.str();
}

std::string config_hash(const Scene& scene) {
  const std::string text = serialize(scene);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string mode_id(std::string_view name) {
  std::string out;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

ElectrodeMode builtin_mode(std::string_view name) {
  const std::string id = mode_id(name);
  for (const auto& row : kModes) {
    if (id == row.id) {
      ElectrodeMode m;
      m.name = row.name;
      m.kind = row.kind;
      m.material = row.material;
      m.ratio_x = row.ratio_x;
      m.ratio_y = row.ratio_y;
      m.thickness = row.thickness;
      return m;
    }
  }
  throw ConfigError("unknown built-in mode '" + std::string(name) + "'");
}

const std::vector<std::string>& builtin_mode_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& row : kModes) v.emplace_back(row.id);
    return v;
  }();
  return ids;
}

std::string default_config_text(std::string_view mode) {
  const ElectrodeMode m = builtin_mode(mode);
  std::string text = R"(# Optical voltage sensor head: Al heating plate, fused-silica support, 10 mm BGO cube.
# Material constants in SI units (densities converted from g/cm^3).

[simulation]
t_total = 60
t_step = 5
ambient_T = 300
heater_T = 358
convection_h = 10        # W/(m^2 K), free convection in air
mesh_resolution = 1e-3
solver_rel_tol = 1e-9

[materials.bgo]
density = 7130
specific_heat = 3.5e2
poisson = 0.20
youngs = 7.31e10
thermal_expansion = 6.3e-6
conductivity = 0.18
rel_permittivity = 16.0  # handbook value for Bi4Ge3O12

[materials.sio2]
density = 2200
specific_heat = 8.91e2
poisson = 0.17
youngs = 7.50e10
thermal_expansion = 5.5e-7
conductivity = 1.46
rel_permittivity = 3.8

[materials.cu]
density = 8940
specific_heat = 3.85e2
poisson = 0.34
youngs = 12.6e10
thermal_expansion = 1.7e-5
conductivity = 400

[materials.al]
density = 2730
specific_heat = 7.50e2
poisson = 0.33
youngs = 7.0e10
thermal_expansion = 2.4e-5
conductivity = 238

[optics]
crystal = "bgo"
base_index = 2.07        # BGO near 1 um (handbook Sellmeier fit)
q11 = -2.995e-13         # only q11 - q12 enters the birefringence
q12 = 0
q44 = -1.365e-12
r41 = 1.03e-12           # m/V, handbook value for BGO
wavelength = 976e-9

[primitive.plate]
shape = "box"
material = "al"
origin = [-25e-3, -25e-3, 0]
extents = [50e-3, 50e-3, 10e-3]
heater = true

[primitive.support]
shape = "cylinder"
material = "sio2"
origin = [0, 0, 10e-3]
radius = 25e-3
height = 15e-3

[primitive.crystal]
shape = "box"
material = "bgo"
origin = [-5e-3, -5e-3, 25e-3]
extents = [10e-3, 10e-3, 10e-3]

[path]
entry = [-5e-3, 0, 30e-3]
direction = [1, 0, 0]
length = 10e-3

[electrode]
mode = ")";
  text += mode_id(m.name);
  text += "\"\napplied_voltage = 1000\n";
  return text;
}

std::vector<Diagnostic> validate(const Scene& scene) {
  std::vector<Diagnostic> out;
  const auto& sim = scene.sim;

  if (scene.geometry.primitives.empty()) {
    out.push_back({"geometry", "missing geometry"});
    return out;
  }
  for (const auto& m : scene.materials) check_material(out, m);

  const auto& o = scene.optics;
  if (!(o.base_index > 1.0)) out.push_back({"optics.base_index", "base_index must exceed 1"});
  if (!std::isfinite(o.q11 - o.q12) || o.q11 - o.q12 == 0.0) {
    out.push_back({"optics.q11", "q11 - q12 must be finite and nonzero"});
  }
  if (!std::isfinite(o.q44) || o.q44 == 0.0) out.push_back({"optics.q44", "q44 must be finite and nonzero"});
  if (!std::isfinite(o.r41)) out.push_back({"optics.r41", "r41 must be finite"});
  if (!(o.wavelength > 0.0)) out.push_back({"optics.wavelength", "wavelength must be positive"});

  if (!(sim.t_step > 0.0)) out.push_back({"simulation.t_step", "nonpositive time step"});
  else if (sim.t_step > sim.t_total) out.push_back({"simulation.t_step", "time step exceeds total time"});
  else if (!near_integer(sim.t_total / sim.t_step)) {
    out.push_back({"simulation.t_step", "time step does not divide total time"});
  }
  if (!(sim.ambient_T > 0.0)) out.push_back({"simulation.ambient_T", "temperature must be positive"});
  if (!(sim.heater_T > 0.0)) out.push_back({"simulation.heater_T", "temperature must be positive"});
  if (!(sim.reference_T > 0.0)) out.push_back({"simulation.reference_T", "temperature must be positive"});
  if (!(sim.convection_h >= 0.0)) out.push_back({"simulation.convection_h", "convection_h must be nonnegative"});
  if (!(sim.solver_rel_tol > 0.0 && sim.solver_rel_tol < 1.0)) {
    out.push_back({"simulation.solver_rel_tol", "tolerance must lie in (0, 1)"});
  }
  if (!(sim.tau_ref > 0.0)) out.push_back({"simulation.tau_ref", "tau_ref must be positive"});
  if (!(sim.mesh_resolution > 0.0)) {
    out.push_back({"simulation.mesh_resolution", "resolution must be positive"});
    return out;
  }

  for (const auto& p : scene.geometry.primitives) {
    const std::string f = "primitive." + p.name;
    if (p.shape == Shape::box && !(p.extents.x > 0 && p.extents.y > 0 && p.extents.z > 0)) {
      out.push_back({f + ".extents", "degenerate box"});
    }
    if (p.shape == Shape::cylinder && !(p.radius > 0 && p.height > 0)) {
      out.push_back({f, "degenerate cylinder"});
    }
  }

  const Primitive* crystal = nullptr;
  int crystal_count = 0;
  for (const auto& p : scene.geometry.primitives) {
    if (p.material == o.crystal) {
      crystal = &p;
      ++crystal_count;
    }
  }
  if (crystal_count != 1 || crystal->shape != Shape::box) {
    out.push_back({"optics.crystal", "exactly one box primitive must be made of the crystal material"});
    return out;
  }
  for (int a = 0; a < 3; ++a) {
    if (!near_integer(crystal->extents[a] / sim.mesh_resolution)) {
      out.push_back({"simulation.mesh_resolution", "resolution does not divide the crystal edge length"});
      break;
    }
  }

  const auto& path = scene.geometry.path;
  const double tol = 1e-9 * std::max(1.0, path.length);
  auto inside_crystal = [&](Vec3 p) {
    for (int a = 0; a < 3; ++a) {
      if (p[a] < crystal->origin[a] - tol || p[a] > crystal->origin[a] + crystal->extents[a] + tol) return false;
    }
    return true;
  };
  if (!(path.length > 0.0)) {
    out.push_back({"path.length", "path length must be positive"});
  } else if (!inside_crystal(path.entry) || !inside_crystal(path.exit())) {
    out.push_back({"path", "optical path leaves the crystal"});
  }

  if (scene.electrode) {
    const auto& e = *scene.electrode;
    if (!(e.ratio_x >= 0.0 && e.ratio_y >= 0.0) || (e.ratio_x == 0.0 && e.ratio_y == 0.0)) {
      out.push_back({"electrode.ratio", "ratios must be nonnegative and not both zero"});
    }
    if (e.ratio_x * 1e-3 > crystal->extents.x + tol || e.ratio_y * 1e-3 > crystal->extents.y + tol) {
      out.push_back({"electrode.ratio", "electrode run exceeds the crystal face"});
    }
    if (!(e.thickness > 0.0)) out.push_back({"electrode.thickness", "thickness must be positive"});
    if (!std::isfinite(e.applied_voltage) || e.applied_voltage == 0.0) {
      out.push_back({"electrode.applied_voltage", "applied voltage must be finite and nonzero"});
    }
    if (e.kind == ElectrodeKind::metal && e.ratio_y > 0.0 && out.empty()) {
      // Metal on the x-normal faces: entry/exit points must keep a voxel of clearance.
      const double h = sim.mesh_resolution;
      const double y0 = crystal->origin.y;
      const double y1 = y0 + crystal->extents.y;
      const double ry = e.ratio_y * 1e-3;
      for (Vec3 p : {path.entry, path.exit()}) {
        const bool on_low_x = std::abs(p.x - crystal->origin.x) <= tol;
        const bool on_high_x = std::abs(p.x - (crystal->origin.x + crystal->extents.x)) <= tol;
        double gap = std::numeric_limits<double>::infinity();
        if (on_low_x) gap = (y1 - ry) - p.y;   // terminal A covers [y1 - ry, y1]
        if (on_high_x) gap = p.y - (y0 + ry);  // terminal B covers [y0, y0 + ry]
        if (gap < h - tol) {
          out.push_back({"path", "path blocked by metal electrode"});
          break;
        }
      }
    }
  }
  return out;
}

std::vector<ElectrodeBox> electrode_boxes(const Scene& scene, double t) {
  std::vector<ElectrodeBox> out;
  if (!scene.electrode) return out;
  const auto& e = *scene.electrode;
  const Primitive& c = scene.crystal();
  const Vec3 lo = c.lower();
  const Vec3 hi = c.upper();
  const double rx = e.ratio_x * 1e-3;
  const double ry = e.ratio_y * 1e-3;
  if (rx > 0.0) {
    out.push_back({{lo.x, hi.y, lo.z}, {lo.x + rx, hi.y + t, hi.z}, 0});
    out.push_back({{hi.x - rx, lo.y - t, lo.z}, {hi.x, lo.y, hi.z}, 1});
  }
  if (ry > 0.0) {
    out.push_back({{lo.x - t, hi.y - ry, lo.z}, {lo.x, hi.y, hi.z}, 0});
    out.push_back({{hi.x, lo.y, lo.z}, {hi.x + t, lo.y + ry, hi.z}, 1});
  }
  if (rx > 0.0 && ry > 0.0) {
    out.push_back({{lo.x - t, hi.y, lo.z}, {lo.x, hi.y + t, hi.z}, 0});
    out.push_back({{hi.x, lo.y - t, lo.z}, {hi.x + t, lo.y, hi.z}, 1});
  }
  return out;
}

}  // namespace ovsim
