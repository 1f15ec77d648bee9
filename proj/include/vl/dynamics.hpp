#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "vl/atom_forces.hpp"

namespace vl {

using Vec3 = std::array<double, 3>;

/// Point-atom state. Stored in Cartesian form; cylindrical views on demand.
struct TrajectoryState {
  double time{0.0};
  Vec3 r{};  // x, y, z (m)
  Vec3 v{};  // vx, vy, vz (m/s)

  [[nodiscard]] CylPoint position() const;
  [[nodiscard]] Velocity velocity() const;
  static TrajectoryState from_cylindrical(const CylPoint& pos, const Velocity& vel, double t);
};

struct IntegratorConfig {
  double step{1e-7};      // s
  double duration{1e-3};  // s
  std::size_t sample_stride{1};
  ForceOptions force{PhaseModel::reduced, Coupling::sum_of_beams, false};
  bool scattering{true};
  bool dipole{true};
  /// Keep the phi-hat force component. Turning it off isolates the axial and
  /// radial motion from the orbital torque.
  bool azimuthal{true};
  /// Enforce step <= 2 pi / (50 sqrt(K0/m)) when K0 > 0 is defined.
  bool check_step{true};

  void validate() const;
};

/// Force in Cartesian components (N) on an atom at r with velocity v.
Vec3 cartesian_force(const AtomSpec& atom, const PairSpec& pair, const IntegratorConfig& cfg,
                     const Vec3& r, const Vec3& v, double t);

/// Classical RK4 in Cartesian coordinates. Returns the initial state and every
/// sample_stride-th step thereafter (the final state is always included).
/// Throws StepSizeError when the step is too coarse for the axial trap and
/// DivergenceError when the atom leaves 10x the beam extent.
std::vector<TrajectoryState> integrate(const AtomSpec& atom, const PairSpec& pair,
                                       const TrajectoryState& init, const IntegratorConfig& cfg);

/// sqrt(K0/m). Throws DomainError when K0 <= 0 (for example d = 0).
double trap_frequency(const AtomSpec& atom, const PairSpec& pair);

/// Kinetic energy plus the dipole potential (when cfg.dipole is set).
double total_energy(const AtomSpec& atom, const PairSpec& pair, const IntegratorConfig& cfg,
                    const TrajectoryState& s);

/// L_z = m (x vy - y vx).
double angular_momentum_z(const AtomSpec& atom, const TrajectoryState& s);

/// Angular frequency of an oscillating signal from linearly interpolated
/// crossings of its mean. Throws NumericalError with fewer than three crossings.
double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& x);

/// Radius beyond which the integrator reports divergence (before the 10x factor).
double beam_extent(const PairSpec& pair);

/// CSV: t, x, y, z, vx, vy, vz, rho, phi.
void write_trajectory_csv(const std::vector<TrajectoryState>& traj, std::ostream& out);

}  // namespace vl
