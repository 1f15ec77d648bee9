#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "vl/lg_mode.hpp"

namespace vl {

/// Two counter-propagating beams with the same linear polarization.
///
/// Beam 1 travels towards +z with its focus at -d/2; beam 2 travels towards -z
/// with its focus at +d/2. Pair-level phases are expressed in the frame that
/// co-rotates with beam 1's carrier, so the common omega*t never appears.
/// Beam 2 carries the extra phase delta_k*z + delta_omega*t, which makes the
/// interference term cos(Theta1 - Theta2 - delta_k z - delta_omega t).
struct PairSpec {
  BeamSpec beam1{};
  BeamSpec beam2{};
  double separation_d{0.0};       // m
  double delta_omega{0.0};        // rad/s
  double delta_k{0.0};            // rad/m
  double reference_amplitude{1.0};  // field amplitude at which the Rabi frequency is Omega_0

  void validate() const;
};

/// Lab-frame handedness of the two azimuthal phases. `opposite` gives a phase
/// difference proportional to (l1 + l2) phi; `same` gives (l1 - l2) phi.
enum class Handedness { opposite, same };

/// Places the beams at -d/2 and +d/2 with directions +1 and -1; every other
/// field (including azimuthal_sign) is taken from the arguments.
PairSpec make_pair(BeamSpec beam1, BeamSpec beam2, double separation_d, double delta_omega = 0.0,
                   double delta_k = 0.0);

/// Two copies of `base`, the second with azimuthal_sign set by `handedness`.
PairSpec make_symmetric_pair(const BeamSpec& base, double separation_d,
                             Handedness handedness = Handedness::opposite,
                             double delta_omega = 0.0);

enum class BeamIndex { first, second };

/// Phase terms of one beam as it enters the pair. Beam 2's time slot holds
/// delta_k*z + delta_omega*t.
PhaseTerms pair_beam_phase_terms(const PairSpec& pair, BeamIndex which, const CylPoint& pt,
                                 double t);

struct PhaseDifference {
  double total{0.0};
  double plane{0.0};      // 2kz (mod 2 pi) for equal wavelengths
  double azimuthal{0.0};  // (l1+l2) phi for opposite handedness
  double gouy{0.0};
  double curvature{0.0};
};

/// Static Theta1 - Theta2 (no delta_k or delta_omega contribution), component by
/// component. `reduced` leaves the Gouy and curvature parts out of `total`.
PhaseDifference phase_difference(const PairSpec& pair, const CylPoint& pt,
                                 PhaseModel model = PhaseModel::full);

/// sqrt(U1^2 + U2^2 + 2 U1 U2 cos(Theta1 - Theta2 - dk z - dw t)), written in a
/// cancellation-free form.
double total_amplitude(const PairSpec& pair, const CylPoint& pt, double t,
                       PhaseModel model = PhaseModel::full);

/// Quadrant-aware total phase; std::nullopt at a dark point.
std::optional<double> total_phase(const PairSpec& pair, const CylPoint& pt, double t,
                                  PhaseModel model = PhaseModel::full);

/// E1 + E2 built from per-beam polar values.
std::complex<double> pair_field(const PairSpec& pair, const CylPoint& pt, double t,
                                PhaseModel model = PhaseModel::full);

/// Relative amplitude below which the total phase is treated as undefined.
inline constexpr double kDarkPhaseFraction = 1e-12;

/// Local field data needed by the force formulas. All members are smooth
/// through dark points, unlike grad U or grad Theta on their own.
struct FieldLocal {
  double amp_sq{0.0};           // U^2
  Gradient u_grad_u{};          // U grad U
  Gradient amp_sq_grad_phase{}; // U^2 grad Theta
  double amp_scale{0.0};        // |U1| + |U2| (or |U|) for dark-point tests

  [[nodiscard]] bool dark(double fraction) const;
  /// grad Theta, or zero when the point is dark.
  [[nodiscard]] Gradient phase_gradient_or_zero() const;
};

FieldLocal beam_local(const BeamSpec& beam, const CylPoint& pt, PhaseModel model);
/// One beam of the pair as seen by sum-of-beams forces; delta_k and delta_omega
/// do not enter.
FieldLocal pair_beam_local(const PairSpec& pair, BeamIndex which, const CylPoint& pt,
                           PhaseModel model);
/// The superposed field.
FieldLocal pair_local(const PairSpec& pair, const CylPoint& pt, double t, PhaseModel model);

// Closed-form diagnostics for an equal-l pair, checked against the exact route in tests.

/// Arctangent-addition form -(|l|+1) atan2(2 z zR, zR^2 - z^2 + d^2/4).
double gouy_difference_identity(int l, double z, double d, double zr);
/// Single-arctangent form with denominator zR^2 - (z^2 + d^2/4).
/// Disagrees with the two-arctangent sum away from z = 0.
double gouy_difference_closed_form(int l, double z, double d, double zr);
/// k rho^2 d / (2 (z^2 + zR^2)).
double curvature_difference_closed_form(double k, double rho, double z, double d, double zr);

enum class Plane { rho_z, xy };

/// Regular sampling of a half-plane (rho, z) at fixed phi, or an (x, y) slice at
/// fixed z. Axis a is rho or x; axis b is z or y.
struct GridSpec {
  Plane plane{Plane::rho_z};
  double a_min{0.0};
  double a_max{0.0};
  std::size_t n_a{1};
  double b_min{0.0};
  double b_max{0.0};
  std::size_t n_b{1};
  double fixed{0.0};  // phi for rho_z, z for xy
  double t{0.0};

  void validate() const;
  [[nodiscard]] double a(std::size_t i) const;
  [[nodiscard]] double b(std::size_t j) const;
  [[nodiscard]] double da() const;
  [[nodiscard]] double db() const;
  [[nodiscard]] CylPoint point(std::size_t i, std::size_t j) const;
  [[nodiscard]] std::size_t size() const { return n_a * n_b; }
};

/// Row-major over b: index = j * n_a + i.
struct FieldMap {
  GridSpec grid{};
  std::vector<double> amplitude;
  std::vector<double> phase;  // NaN at dark points
  std::vector<double> intensity;

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return j * grid.n_a + i; }
};

FieldMap intensity_map(const PairSpec& pair, const GridSpec& grid,
                       PhaseModel model = PhaseModel::full);

/// CSV: coord1, coord2, amplitude, phase, intensity ("nan" phase at dark points).
void write_field_map_csv(const FieldMap& map, std::ostream& out);

}  // namespace vl
