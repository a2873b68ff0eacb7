#pragma once

// Reference matrices of the trilinear hexahedron on the unit cube. Physical element
// matrices of a cube with edge h follow by scaling:
//   conduction        K_e = k * h * laplacian()
//   elasticity        K_e = h * (lambda * stiffness_lambda() + mu * stiffness_mu())
//   thermal load      f_e = h^2 * (3 lambda + 2 mu) * alpha * thermal_load() * dT_nodes
//   centroid strain   eps = centroid_strain() * u_e / h   (engineering shears)
//   centroid gradient grad = centroid_gradient() * phi_e / h
// Local node order is a + 2b + 4c for offsets (a, b, c) in {0, 1}^3.

#include <Eigen/Core>

namespace ovsim::fem {

using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Matrix24 = Eigen::Matrix<double, 24, 24>;
using Matrix24x8 = Eigen::Matrix<double, 24, 8>;
using Matrix6x24 = Eigen::Matrix<double, 6, 24>;
using Matrix3x8 = Eigen::Matrix<double, 3, 8>;

const Matrix8& laplacian();
const Matrix24& stiffness_lambda();
const Matrix24& stiffness_mu();
const Matrix24x8& thermal_load();
const Matrix6x24& centroid_strain();
const Matrix3x8& centroid_gradient();

struct Lame {
  double lambda;
  double mu;
};

inline Lame lame(double youngs, double poisson) {
  return {youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)), youngs / (2.0 * (1.0 + poisson))};
}

}  // namespace ovsim::fem
