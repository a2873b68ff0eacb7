#include "ovsim/fem.hpp"

#include <array>
#include <cmath>

namespace ovsim::fem {
namespace {

struct QuadPoint {
  double xi[3];
  double weight;
};

std::array<QuadPoint, 8> gauss2() {
  const double g = 0.5 / std::sqrt(3.0);
  const double p[2] = {0.5 - g, 0.5 + g};
  std::array<QuadPoint, 8> q{};
  int n = 0;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) q[n++] = {{p[a], p[b], p[c]}, 0.125};
  return q;
}

double phi(int a, double t) { return a ? t : 1.0 - t; }
double dphi(int a) { return a ? 1.0 : -1.0; }

Eigen::Matrix<double, 8, 1> shape(const double xi[3]) {
  Eigen::Matrix<double, 8, 1> n;
  for (int l = 0; l < 8; ++l) n(l) = phi(l & 1, xi[0]) * phi((l >> 1) & 1, xi[1]) * phi((l >> 2) & 1, xi[2]);
  return n;
}

Matrix3x8 gradient(const double xi[3]) {
  Matrix3x8 g;
  for (int l = 0; l < 8; ++l) {
    const int a = l & 1, b = (l >> 1) & 1, c = (l >> 2) & 1;
    g(0, l) = dphi(a) * phi(b, xi[1]) * phi(c, xi[2]);
    g(1, l) = phi(a, xi[0]) * dphi(b) * phi(c, xi[2]);
    g(2, l) = phi(a, xi[0]) * phi(b, xi[1]) * dphi(c);
  }
  return g;
}

// Strain-displacement matrix, engineering shear order (xx, yy, zz, xy, yz, xz).
Matrix6x24 strain(const Matrix3x8& g) {
  Matrix6x24 B = Matrix6x24::Zero();
  for (int l = 0; l < 8; ++l) {
    const int u = 3 * l, v = 3 * l + 1, w = 3 * l + 2;
    B(0, u) = g(0, l);
    B(1, v) = g(1, l);
    B(2, w) = g(2, l);
    B(3, u) = g(1, l);
    B(3, v) = g(0, l);
    B(4, v) = g(2, l);
    B(4, w) = g(1, l);
    B(5, u) = g(2, l);
    B(5, w) = g(0, l);
  }
  return B;
}

}  // namespace

const Matrix8& laplacian() {
  static const Matrix8 K = [] {
    Matrix8 k = Matrix8::Zero();
    for (const auto& q : gauss2()) {
      const Matrix3x8 g = gradient(q.xi);
      k += q.weight * g.transpose() * g;
    }
    return k;
  }();
  return K;
}

const Matrix24& stiffness_lambda() {
  static const Matrix24 K = [] {
    Eigen::Matrix<double, 6, 6> D = Eigen::Matrix<double, 6, 6>::Zero();
    D.topLeftCorner<3, 3>().setOnes();
    Matrix24 k = Matrix24::Zero();
    for (const auto& q : gauss2()) {
      const Matrix6x24 B = strain(gradient(q.xi));
      k += q.weight * B.transpose() * D * B;
    }
    return k;
  }();
  return K;
}

const Matrix24& stiffness_mu() {
  static const Matrix24 K = [] {
    Eigen::Matrix<double, 6, 1> d;
    d << 2, 2, 2, 1, 1, 1;
    const Eigen::Matrix<double, 6, 6> D = d.asDiagonal();
    Matrix24 k = Matrix24::Zero();
    for (const auto& q : gauss2()) {
      const Matrix6x24 B = strain(gradient(q.xi));
      k += q.weight * B.transpose() * D * B;
    }
    return k;
  }();
  return K;
}

const Matrix24x8& thermal_load() {
  static const Matrix24x8 G = [] {
    Eigen::Matrix<double, 6, 1> m;
    m << 1, 1, 1, 0, 0, 0;
    Matrix24x8 g = Matrix24x8::Zero();
    for (const auto& q : gauss2()) {
      const Matrix6x24 B = strain(gradient(q.xi));
      g += q.weight * B.transpose() * m * shape(q.xi).transpose();
    }
    return g;
  }();
  return G;
}

const Matrix6x24& centroid_strain() {
  static const Matrix6x24 B = [] {
    const double c[3] = {0.5, 0.5, 0.5};
    return strain(gradient(c));
  }();
  return B;
}

const Matrix3x8& centroid_gradient() {
  static const Matrix3x8 G = [] {
    const double c[3] = {0.5, 0.5, 0.5};
    return gradient(c);
  }();
  return G;
}

}  // namespace ovsim::fem
