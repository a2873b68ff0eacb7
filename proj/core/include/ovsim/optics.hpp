#pragma once

#include <Eigen/Core>
#include <complex>
#include <span>
#include <vector>

#include "ovsim/scene.hpp"
#include "ovsim/types.hpp"

namespace ovsim {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Jones = Eigen::Matrix<std::complex<double>, 2, 2>;

/// Crystal/simulation frame transforms. Six-vectors are ordered (11, 22, 33, 12, 23, 13).
struct TransformSet {
  Eigen::Matrix3d T;  // simulation -> crystal axes; symmetric, T * T = I
  Matrix6 A;          // stress six-vector transform
  Matrix6 Q_cry;      // photoelastic matrix, cubic crystal frame
  Matrix6 Q_sim;      // A * Q_cry * A^-1
};

TransformSet build_transforms(const OpticalProps& optics);

/// Index-ellipsoid perturbation Q_sim * sigma (stress in Pa, simulation frame).
SymTensor deltaB_from_stress(const SymTensor& stress, const TransformSet& transforms);

/// Birefringence of one optical-path section.
struct SectionBirefringence {
  double delta_n = 0.0;  // |dn| >= 0
  double theta = 0.0;    // reported fast-axis angle, 0.5 * atan|2Bjk / (Bjj - Bkk)|
  double axis = 0.0;     // full-quadrant axis 0.5 * atan2(2Bjk, Bjj - Bkk), used in Jones matrices
  double delta = 0.0;    // phase 2 pi L dn / lambda
  double length = 0.0;   // m
};

/// Transverse analysis for light along `axis`; (j, k) are the two remaining indices in
/// increasing order, so x-propagation uses (y, z).
SectionBirefringence principal_birefringence(const SymTensor& dB, Axis axis, double n0, double length,
                                             double wavelength);

/// R(a)^-1 P(delta) R(a) with the section's full-quadrant axis a.
Jones section_jones(const SectionBirefringence& section);

/// Ordered product J_last ... J_first.
Jones chain_matrix(std::span<const SectionBirefringence> sections);

/// Polarizer (1, 0) -> chain -> quarter-wave plate -> analyzer; returns |E_out|^2.
double output_intensity(const Jones& chain);
double propagate(std::span<const SectionBirefringence> sections);

/// propagate(sections) - 0.5
double birefringence_error(std::span<const SectionBirefringence> sections);

/// Stress tensors along a path -> sections (lengths from the path, wavelength from optics).
std::vector<SectionBirefringence> stress_sections(std::span<const SymTensor> stress,
                                                  std::span<const double> lengths, const TransformSet& transforms,
                                                  const OpticalProps& optics, Axis axis);

/// Dominant simulation axis of a unit direction; throws MeshError if it is not axis-aligned.
Axis propagation_axis(Vec3 direction);

}  // namespace ovsim
