#pragma once

#include <complex>
#include <functional>
#include <ostream>
#include <vector>

#include "vl/constants.hpp"
#include "vl/superpose.hpp"

namespace vl {

/// Two-level atom. All frequencies are angular (rad/s).
struct AtomSpec {
  double gamma{2.0 * kPi * 10.01e6};  // natural linewidth
  double delta0{0.0};       // laser minus transition frequency
  double omega0_rabi{0.0};  // Rabi frequency at the pair's reference amplitude
  double mass{3.8175e-26};  // kg

  void validate() const;
};

/// Sodium D2 line parameters; detuning and Rabi scale given in units of Gamma.
AtomSpec sodium_d2(double delta0_over_gamma, double omega0_over_gamma);

/// How two beams act on the atom. `sum_of_beams` adds the single-beam forces
/// (low-intensity treatment); `total_field` applies the single-field formulas
/// to the superposed amplitude and phase, an extrapolation beyond that regime.
enum class Coupling { sum_of_beams, total_field };

enum class FieldSource { beam1, beam2, pair };

struct ForceOptions {
  PhaseModel phase_model{PhaseModel::full};
  Coupling coupling{Coupling::sum_of_beams};
  bool velocity_coupling{true};  // include -v.grad(Theta) in the detuning
};

/// Omega = Omega_0 * amplitude / amp_scale_ref.
double rabi_at(const AtomSpec& atom, double amplitude, double amp_scale_ref);

/// Phase gradient of a single beam (analytic).
Gradient phase_gradient(const BeamSpec& beam, const CylPoint& pt, PhaseModel model);
/// Phase gradient of the superposed field (analytic). Throws DarkPointError
/// when the total amplitude is below 1e-9 of |U1| + |U2|.
Gradient phase_gradient(const PairSpec& pair, const CylPoint& pt, double t, PhaseModel model);

/// min(lambda/200, w0/200).
double default_fd_step(const BeamSpec& beam);

/// Central-difference phase gradient of an arbitrary complex field, comparing
/// neighbouring values through arg(E+ / E-) so that no unwrapping is needed.
/// With `richardson`, combines steps h and h/2 to cancel the h^2 error term.
Gradient phase_gradient_fd(const std::function<std::complex<double>(const CylPoint&)>& field,
                           const CylPoint& pt, double step, bool richardson);

double detuning_eff(const AtomSpec& atom, const Velocity& vel, const Gradient& grad);

/// (hbar Gamma / 4) Omega^2 grad(Theta) / (Delta^2 + Omega^2/2 + Gamma^2/4).
/// For FieldSource::pair the options select sum-of-beams or total-field.
ForceVec scattering_force(const AtomSpec& atom, const PairSpec& pair, FieldSource source,
                          const CylPoint& pt, const Velocity& vel, double t,
                          const ForceOptions& opts);

/// -(1/2) hbar Omega grad(Omega) Delta / (Delta^2 + Omega^2/2 + Gamma^2/4).
ForceVec dipole_force(const AtomSpec& atom, const PairSpec& pair, FieldSource source,
                      const CylPoint& pt, const Velocity& vel, double t,
                      const ForceOptions& opts);

/// (1/2) hbar Delta ln(1 + (Omega^2/2) / (Delta^2 + Gamma^2/4)).
double dipole_potential(const AtomSpec& atom, const PairSpec& pair, FieldSource source,
                        const CylPoint& pt, const Velocity& vel, double t,
                        const ForceOptions& opts);

// ---------------------------------------------------------------------------
// Low-intensity analysis of a symmetric doughnut pair (p = 0, equal |l|, w0 and
// amplitude). Gouy and curvature phases are dropped, v = 0.

/// Omega^2 / (Delta0^2 + Gamma^2/4 + Omega^2/2) for beam 1 at pt.
double q_plus(const AtomSpec& atom, const PairSpec& pair, const CylPoint& pt);
/// Same for beam 2.
double q_minus(const AtomSpec& atom, const PairSpec& pair, const CylPoint& pt);

/// Axial spring constant K(rho) with F_z = -K z near the midplane.
double spring_constant(const AtomSpec& atom, const PairSpec& pair, double rho);
/// K at the central ring radius.
double spring_constant_k0(const AtomSpec& atom, const PairSpec& pair);
/// -dF_z/dz at (rho0, 0) from central differences of the reduced sum-of-beams
/// scattering force. step <= 0 selects default_fd_step.
double spring_constant_numeric(const AtomSpec& atom, const PairSpec& pair, double step = 0.0);
/// (1/2) K0 z^2.
double harmonic_potential_v0(const AtomSpec& atom, const PairSpec& pair, double z);
/// w0 sqrt(|l|/2) sqrt(1 + d^2/(4 zR^2)).
double central_ring_radius(const PairSpec& pair);
/// rho0 * F_phi(rho0, 0) of the reduced sum-of-beams force. Equals
/// (hbar Gamma l / 2) Q+ when both beams share lab-frame handedness and
/// vanishes for opposite handedness.
double torque_axial(const AtomSpec& atom, const PairSpec& pair);

/// Angular velocity of the interference pattern, delta_omega / (s1 l1 - s2 l2).
/// Throws DomainError when the azimuthal phase difference has no winding.
double ferris_rate(const PairSpec& pair);
/// Approximate axial pattern speed delta_omega / (2k).
double lift_speed(const PairSpec& pair);

/// Throws DomainError unless the pair is two p = 0 doughnuts with equal |l|,
/// waist and amplitude.
void require_symmetric_doughnuts(const PairSpec& pair);

struct ForceMap {
  GridSpec grid{};
  std::vector<ForceVec> force;  // same layout as FieldMap
};

/// Total (scattering + dipole) force on an atom at rest over a grid.
ForceMap force_map(const AtomSpec& atom, const PairSpec& pair, const GridSpec& grid,
                   const ForceOptions& opts);
/// CSV: coord1, coord2, f_rho, f_phi, f_z.
void write_force_map_csv(const ForceMap& map, std::ostream& out);

}  // namespace vl
