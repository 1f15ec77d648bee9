#pragma once

#include <complex>
#include <optional>

#include "vl/vector.hpp"

namespace vl {

/// One Laguerre-Gaussian beam.
///
/// Positions passed to the mode functions are in the lab frame. Each beam
/// converts them to its own propagation frame, z_local = direction * (z - focal_z),
/// and evaluates the Gouy and curvature phases there. The lab-frame azimuthal
/// phase is azimuthal_sign * l * phi.
struct BeamSpec {
  double wavelength{589.16e-9};  // m
  double waist_w0{8e-6};         // m
  int winding_l{1};
  int radial_p{0};
  int direction{+1};  // +1 travels towards +z, -1 towards -z
  double focal_z{0.0};
  double amp_scale{1.0};  // plane-wave amplitude of the corresponding mode
  int azimuthal_sign{+1};
  /// Replaces the default normalization sqrt(p!/(p+|l|)!) when set.
  std::optional<double> norm_override{};

  /// Throws DomainError on invalid fields.
  void validate() const;

  [[nodiscard]] double wavenumber() const;
  /// Angular frequency omega = c k.
  [[nodiscard]] double angular_frequency() const;
  [[nodiscard]] double local_z(double z_lab) const { return direction * (z_lab - focal_z); }
};

/// Lab-frame cylindrical point.
struct CylPoint {
  double rho{0.0};
  double phi{0.0};
  double z{0.0};
};

/// Complex field value at a point. amplitude >= 0; phase is the principal value.
struct FieldSample {
  double amplitude{0.0};
  double phase{0.0};
  std::complex<double> complex_value{};
};

/// Phase contributions of one mode, each in radians, before reduction mod 2 pi.
struct PhaseTerms {
  double plane{0.0};      // k * z_local, whole wavelengths removed: in [-pi, pi]
  double azimuthal{0.0};  // azimuthal_sign * l * phi
  double gouy{0.0};       // -(2p+|l|+1) atan(z_local / z_R)
  double curvature{0.0};  // k rho^2 z_local / (2 (z_local^2 + z_R^2))
  double time{0.0};       // omega t

  [[nodiscard]] double total() const { return plane + azimuthal + gouy + curvature + time; }
};

/// Selects which phase terms enter phase values and gradients. `reduced`
/// keeps only the plane-wave and azimuthal terms (Gouy and curvature dropped).
enum class PhaseModel { reduced, full };

double rayleigh_range(const BeamSpec& beam);
double waist_at(const BeamSpec& beam, double z_local);

/// Associated Laguerre polynomial L^alpha_p(x) by upward recurrence in p.
double laguerre_poly(int p, int alpha, double x);

/// Normalization constant C_lp.
double mode_norm(const BeamSpec& beam);

/// Signed amplitude U_klp. Non-negative for p = 0; for p > 0 it carries the
/// sign of the Laguerre factor, which mode_field folds into the phase.
double mode_amplitude(const BeamSpec& beam, const CylPoint& pt);

/// Analytic gradient of mode_amplitude in the local cylindrical frame. The phi
/// component is always zero.
Gradient mode_amplitude_gradient(const BeamSpec& beam, const CylPoint& pt);

PhaseTerms mode_phase_terms(const BeamSpec& beam, const CylPoint& pt, double t);

/// Unwrapped phase: sum of all PhaseTerms.
double mode_phase(const BeamSpec& beam, const CylPoint& pt, double t);

/// Analytic phase gradient. For `reduced` this is exactly
/// direction*k z-hat + azimuthal_sign*l/rho phi-hat.
Gradient mode_phase_gradient(const BeamSpec& beam, const CylPoint& pt, PhaseModel model);

FieldSample mode_field(const BeamSpec& beam, const CylPoint& pt, double t);

/// Largest residual of the paraxial equation  lap_perp psi + 2ik d(psi)/dz = 0,
/// psi = E exp(-ik z_local), over a fixed set of points within two Rayleigh
/// ranges of the focus, relative to the largest |2ik d(psi)/dz|. Derivatives are
/// fourth-order central differences with transverse step w0/50 and axial step zR/100.
double paraxial_residual(const BeamSpec& beam);

/// Maps an angle to (-pi, pi].
double principal_value(double angle);

}  // namespace vl
