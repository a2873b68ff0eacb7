#include "ovsim/optics.hpp"

#include <Eigen/LU>
#include <cmath>

#include "ovsim/error.hpp"

namespace ovsim {

TransformSet build_transforms(const OpticalProps& optics) {
  TransformSet ts;
  const double r = std::sqrt(2.0) / 2.0;
  ts.T << -r, r, 0,
           r, r, 0,
           0, 0, 1;
  ts.A << 0.5, 0.5, 0, 0, 0, -0.5,
          0.5, 0.5, 0, 0, 0, 0.5,
          0, 0, 1, 0, 0, 0,
          0, 0, 0, r, r, 0,
          0, 0, 0, r, -r, 0,
          -0.5, 0.5, 0, 0, 0, 0;
  const double q11 = optics.q11, q12 = optics.q12, q44 = optics.q44;
  ts.Q_cry.setZero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ts.Q_cry(i, j) = i == j ? q11 : q12;
    ts.Q_cry(3 + i, 3 + i) = q44;
  }
  ts.Q_sim = ts.A * ts.Q_cry * ts.A.inverse();
  return ts;
}

SymTensor deltaB_from_stress(const SymTensor& stress, const TransformSet& transforms) {
  const Eigen::Map<const Eigen::Matrix<double, 6, 1>> s(stress.c.data());
  SymTensor out;
  Eigen::Map<Eigen::Matrix<double, 6, 1>>(out.c.data()) = transforms.Q_sim * s;
  return out;
}

SectionBirefringence principal_birefringence(const SymTensor& dB, Axis axis, double n0, double length,
                                             double wavelength) {
  int j = 1, k = 2;
  if (axis == Axis::y) {
    j = 0;
    k = 2;
  } else if (axis == Axis::z) {
    j = 0;
    k = 1;
  }
  const double diff = dB(j, j) - dB(k, k);
  const double off = dB(j, k);
  SectionBirefringence s;
  s.length = length;
  s.delta_n = 0.5 * n0 * n0 * n0 * std::hypot(diff, 2.0 * off);
  if (diff == 0.0) {
    s.theta = off == 0.0 ? 0.0 : kPi / 4.0;
  } else {
    s.theta = 0.5 * std::atan(std::abs(2.0 * off / diff));
  }
  s.axis = 0.5 * std::atan2(2.0 * off, diff);
  s.delta = 2.0 * kPi * length * s.delta_n / wavelength;
  return s;
}

Jones section_jones(const SectionBirefringence& section) {
  using C = std::complex<double>;
  const double c = std::cos(section.axis), s = std::sin(section.axis);
  Jones R, Rinv, P;
  R << c, s, -s, c;
  Rinv << c, -s, s, c;
  P << std::polar(1.0, section.delta / 2.0), C(0.0), C(0.0), std::polar(1.0, -section.delta / 2.0);
  return Rinv * P * R;
}

Jones chain_matrix(std::span<const SectionBirefringence> sections) {
  Jones m = Jones::Identity();
  for (const auto& s : sections) m = section_jones(s) * m;
  return m;
}

double output_intensity(const Jones& chain) {
  using C = std::complex<double>;
  // The quarter-wave plate's 1/sqrt(2) is applied as a factor 1/2 on the intensity so
  // that the static work point comes out as exactly 0.5.
  Jones Q, L;
  Q << C(1, 0), C(0, 1), C(0, 1), C(1, 0);
  L << C(0), C(0), C(0), C(1);
  Eigen::Matrix<C, 2, 1> e_in(C(1), C(0));
  const Eigen::Matrix<C, 2, 1> e_out = L * Q * chain * e_in;
  return 0.5 * (std::norm(e_out[0]) + std::norm(e_out[1]));
}

double propagate(std::span<const SectionBirefringence> sections) {
  return output_intensity(chain_matrix(sections));
}

double birefringence_error(std::span<const SectionBirefringence> sections) {
  // The zero chain is exactly the identity, so a stress-free path yields 0 exactly.
  return propagate(sections) - 0.5;
}

std::vector<SectionBirefringence> stress_sections(std::span<const SymTensor> stress,
                                                  std::span<const double> lengths, const TransformSet& transforms,
                                                  const OpticalProps& optics, Axis axis) {
  std::vector<SectionBirefringence> out;
  out.reserve(stress.size());
  for (std::size_t m = 0; m < stress.size(); ++m) {
    out.push_back(principal_birefringence(deltaB_from_stress(stress[m], transforms), axis, optics.base_index,
                                          lengths[m], optics.wavelength));
  }
  return out;
}

Axis propagation_axis(Vec3 direction) {
  for (int a = 0; a < 3; ++a) {
    if (std::abs(std::abs(direction[a]) - 1.0) < 1e-12) return static_cast<Axis>(a);
  }
  throw MeshError("optical path must run along a coordinate axis");
}

}  // namespace ovsim
