#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ovsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Symmetric rank-2 tensor stored as (11, 22, 33, 12, 23, 13).
struct SymTensor {
  std::array<double, 6> c{};

  double xx() const { return c[0]; }
  double yy() const { return c[1]; }
  double zz() const { return c[2]; }
  double xy() const { return c[3]; }
  double yz() const { return c[4]; }
  double xz() const { return c[5]; }

  /// Full-matrix access, (i, j) in 0..2.
  double operator()(int i, int j) const {
    if (i == j) return c[i];
    const int lo = i < j ? i : j;
    const int hi = i < j ? j : i;
    if (lo == 0 && hi == 1) return c[3];
    if (lo == 1 && hi == 2) return c[4];
    return c[5];
  }

  friend bool operator==(const SymTensor&, const SymTensor&) = default;
};

/// Propagation axis for birefringence analysis.
enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace ovsim
