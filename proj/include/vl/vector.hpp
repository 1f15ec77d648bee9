#pragma once

#include <cmath>

namespace vl {

/// Vector in the local cylindrical frame (rho-hat, phi-hat, z-hat) at a point.
/// The tag keeps forces, velocities and gradients from mixing silently.
template <class Tag>
struct CylVector {
  double rho{0.0};
  double phi{0.0};
  double z{0.0};

  constexpr CylVector& operator+=(const CylVector& o) {
    rho += o.rho;
    phi += o.phi;
    z += o.z;
    return *this;
  }
  constexpr CylVector& operator-=(const CylVector& o) {
    rho -= o.rho;
    phi -= o.phi;
    z -= o.z;
    return *this;
  }
  constexpr CylVector& operator*=(double s) {
    rho *= s;
    phi *= s;
    z *= s;
    return *this;
  }
  friend constexpr CylVector operator+(CylVector a, const CylVector& b) { return a += b; }
  friend constexpr CylVector operator-(CylVector a, const CylVector& b) { return a -= b; }
  friend constexpr CylVector operator*(CylVector a, double s) { return a *= s; }
  friend constexpr CylVector operator*(double s, CylVector a) { return a *= s; }

  [[nodiscard]] double norm() const { return std::sqrt(rho * rho + phi * phi + z * z); }
};

template <class A, class B>
constexpr double dot(const CylVector<A>& a, const CylVector<B>& b) {
  return a.rho * b.rho + a.phi * b.phi + a.z * b.z;
}

struct GradientTag;
struct ForceTag;
struct VelocityTag;

/// Spatial gradient; the phi component is (1/rho) d/dphi.
using Gradient = CylVector<GradientTag>;
/// Force in newtons.
using ForceVec = CylVector<ForceTag>;
/// Velocity in m/s.
using Velocity = CylVector<VelocityTag>;

}  // namespace vl
