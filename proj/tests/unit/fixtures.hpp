#pragma once

#include <map>
#include <sstream>
#include <string>

#include "ovsim/scene.hpp"

namespace fixtures {

/// Default stack shrunk to a 16 mm plate, small support disc and the full 10 mm
/// crystal, so the built-in electrode modes still fit. Two 5 s steps.
inline ovsim::Scene mini_scene(const std::string& mode = "cu_10_0", double t_total = 10.0) {
  std::map<std::string, std::string> o = {
      {"OVSIM__primitive__plate__origin", "[-8e-3, -8e-3, 0]"},
      {"OVSIM__primitive__plate__extents", "[16e-3, 16e-3, 2e-3]"},
      {"OVSIM__primitive__support__origin", "[0, 0, 2e-3]"},
      {"OVSIM__primitive__support__radius", "6e-3"},
      {"OVSIM__primitive__support__height", "2e-3"},
      {"OVSIM__primitive__crystal__origin", "[-5e-3, -5e-3, 4e-3]"},
      {"OVSIM__path__entry", "[-5e-3, 0, 9e-3]"},
      {"OVSIM__simulation__t_total", std::to_string(t_total)},
  };
  return ovsim::parse_config(ovsim::default_config_text(mode), o);
}

struct Block {
  double ex = 4e-3, ey = 4e-3, ez = 4e-3;
  double resolution = 1e-3;
  bool heater = false;
  double convection_h = 10.0;
  double t_total = 60.0;
  double t_step = 5.0;
  double heater_T = 358.0;
  // material
  double density = 7130, specific_heat = 350, poisson = 0.2, youngs = 7.31e10;
  double expansion = 6.3e-6, conductivity = 0.18;
};

/// Single crystal box at the origin corner, no electrodes.
inline std::string block_text(const Block& b) {
  std::ostringstream s;
  s.precision(17);
  s << "[simulation]\n"
    << "t_total = " << b.t_total << "\nt_step = " << b.t_step << "\nheater_T = " << b.heater_T
    << "\nconvection_h = " << b.convection_h << "\nmesh_resolution = " << b.resolution << "\n"
    << "[materials.m]\n"
    << "density = " << b.density << "\nspecific_heat = " << b.specific_heat << "\npoisson = " << b.poisson
    << "\nyoungs = " << b.youngs << "\nthermal_expansion = " << b.expansion
    << "\nconductivity = " << b.conductivity << "\n"
    << "[optics]\ncrystal = \"m\"\nbase_index = 2.07\nq11 = -2.995e-13\nq12 = 0\nq44 = -1.365e-12\nr41 = 1.03e-12\n"
    << "[primitive.crystal]\nshape = \"box\"\nmaterial = \"m\"\norigin = [0, 0, 0]\n"
    << "extents = [" << b.ex << ", " << b.ey << ", " << b.ez << "]\n"
    << "heater = " << (b.heater ? "true" : "false") << "\n"
    << "[path]\nentry = [0, " << b.ey / 2 << ", " << b.ez / 2 << "]\ndirection = [1, 0, 0]\nlength = " << b.ex << "\n";
  return s.str();
}

inline ovsim::Scene block_scene(const Block& b) { return ovsim::parse_config(block_text(b)); }

}  // namespace fixtures
