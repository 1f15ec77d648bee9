#include "vl/atom_forces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "vl/constants.hpp"
#include "vl/csv.hpp"
#include "vl/errors.hpp"
#include "vl/parallel.hpp"

namespace vl {

void AtomSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("atom linewidth must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("atom mass must be positive");
  if (!(omega0_rabi >= 0.0) || !std::isfinite(omega0_rabi))
    throw DomainError("Rabi scale must be non-negative");
  if (!std::isfinite(delta0)) throw DomainError("detuning must be finite");
}

AtomSpec sodium_d2(double delta0_over_gamma, double omega0_over_gamma) {
  AtomSpec a;
  a.gamma = 2.0 * kPi * 10.01e6;
  a.delta0 = delta0_over_gamma * a.gamma;
  a.omega0_rabi = omega0_over_gamma * a.gamma;
  a.mass = kSodiumMass;
  return a;
}

double rabi_at(const AtomSpec& atom, double amplitude, double amp_scale_ref) {
  if (!(amp_scale_ref > 0.0)) throw DomainError("reference amplitude must be positive");
  return atom.omega0_rabi * std::abs(amplitude) / amp_scale_ref;
}

Gradient phase_gradient(const BeamSpec& beam, const CylPoint& pt, PhaseModel model) {
  return mode_phase_gradient(beam, pt, model);
}

namespace {
constexpr double kDarkGradientFraction = 1e-9;
}

Gradient phase_gradient(const PairSpec& pair, const CylPoint& pt, double t, PhaseModel model) {
  const FieldLocal f = pair_local(pair, pt, t, model);
  if (f.dark(kDarkGradientFraction))
    throw DarkPointError("phase gradient undefined at a dark point (rho=" + std::to_string(pt.rho) +
                         ", z=" + std::to_string(pt.z) + ")");
  return f.amp_sq_grad_phase * (1.0 / f.amp_sq);
}

double default_fd_step(const BeamSpec& beam) {
  return std::min(beam.wavelength, beam.waist_w0) / 200.0;
}

namespace {

struct Cartesian {
  double x, y, z;
};

CylPoint to_cyl(const Cartesian& c) { return {std::hypot(c.x, c.y), std::atan2(c.y, c.x), c.z}; }

// Central difference of the phase along each Cartesian axis at step h.
std::array<double, 3> cartesian_phase_slopes(
    const std::function<std::complex<double>(const CylPoint&)>& field, const Cartesian& c,
    double h) {
  std::array<double, 3> g{};
  for (int axis = 0; axis < 3; ++axis) {
    Cartesian plus = c;
    Cartesian minus = c;
    double* pp = axis == 0 ? &plus.x : axis == 1 ? &plus.y : &plus.z;
    double* pm = axis == 0 ? &minus.x : axis == 1 ? &minus.y : &minus.z;
    *pp += h;
    *pm -= h;
    const std::complex<double> ep = field(to_cyl(plus));
    const std::complex<double> em = field(to_cyl(minus));
    if (ep == 0.0 || em == 0.0) throw DarkPointError("finite-difference stencil touches a dark point");
    g[static_cast<std::size_t>(axis)] = std::arg(ep / em) / (2.0 * h);
  }
  return g;
}

}  // namespace

Gradient phase_gradient_fd(const std::function<std::complex<double>(const CylPoint&)>& field,
                           const CylPoint& pt, double step, bool richardson) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  const Cartesian c{pt.rho * std::cos(pt.phi), pt.rho * std::sin(pt.phi), pt.z};
  std::array<double, 3> g = cartesian_phase_slopes(field, c, step);
  if (richardson) {
    const std::array<double, 3> half = cartesian_phase_slopes(field, c, 0.5 * step);
    for (std::size_t i = 0; i < 3; ++i) g[i] = (4.0 * half[i] - g[i]) / 3.0;
  }
  const double cp = std::cos(pt.phi);
  const double sp = std::sin(pt.phi);
  Gradient out;
  out.rho = g[0] * cp + g[1] * sp;
  out.phi = pt.rho < kAxisEpsilon ? 0.0 : -g[0] * sp + g[1] * cp;
  out.z = g[2];
  return out;
}

double detuning_eff(const AtomSpec& atom, const Velocity& vel, const Gradient& grad) {
  return atom.delta0 - dot(vel, grad);
}

namespace {

// Field contributions that the force formulas are applied to, one by one.
std::vector<FieldLocal> contributions(const PairSpec& pair, FieldSource source,
                                      const CylPoint& pt, double t, const ForceOptions& opts) {
  switch (source) {
    case FieldSource::beam1:
      return {pair_beam_local(pair, BeamIndex::first, pt, opts.phase_model)};
    case FieldSource::beam2:
      return {pair_beam_local(pair, BeamIndex::second, pt, opts.phase_model)};
    case FieldSource::pair:
      if (opts.coupling == Coupling::sum_of_beams)
        return {pair_beam_local(pair, BeamIndex::first, pt, opts.phase_model),
                pair_beam_local(pair, BeamIndex::second, pt, opts.phase_model)};
      return {pair_local(pair, pt, t, opts.phase_model)};
  }
  return {};
}

struct LocalCoupling {
  double rabi_sq;    // Omega^2
  double detuning;   // Delta_eff
  double kappa;      // (Omega_0 / ref)^2
};

LocalCoupling couple(const AtomSpec& atom, const PairSpec& pair, const FieldLocal& f,
                     const Velocity& vel, const ForceOptions& opts) {
  const double scale = atom.omega0_rabi / pair.reference_amplitude;
  LocalCoupling c;
  c.kappa = scale * scale;
  c.rabi_sq = c.kappa * f.amp_sq;
  c.detuning = opts.velocity_coupling ? detuning_eff(atom, vel, f.phase_gradient_or_zero())
                                      : atom.delta0;
  return c;
}

}  // namespace

ForceVec scattering_force(const AtomSpec& atom, const PairSpec& pair, FieldSource source,
                          const CylPoint& pt, const Velocity& vel, double t,
                          const ForceOptions& opts) {
  ForceVec total;
  for (const FieldLocal& f : contributions(pair, source, pt, t, opts)) {
    const LocalCoupling c = couple(atom, pair, f, vel, opts);
    const double denom =
        c.detuning * c.detuning + 0.5 * c.rabi_sq + 0.25 * atom.gamma * atom.gamma;
    const double pref = 0.25 * kHbar * atom.gamma * c.kappa / denom;
    const Gradient g = f.amp_sq_grad_phase;
    total += ForceVec{pref * g.rho, pref * g.phi, pref * g.z};
  }
  return total;
}

ForceVec dipole_force(const AtomSpec& atom, const PairSpec& pair, FieldSource source,
                      const CylPoint& pt, const Velocity& vel, double t,
                      const ForceOptions& opts) {
  ForceVec total;
  for (const FieldLocal& f : contributions(pair, source, pt, t, opts)) {
    const LocalCoupling c = couple(atom, pair, f, vel, opts);
    const double denom =
        c.detuning * c.detuning + 0.5 * c.rabi_sq + 0.25 * atom.gamma * atom.gamma;
    // Omega grad(Omega) = kappa U grad(U)
    const double pref = -0.5 * kHbar * c.kappa * c.detuning / denom;
    const Gradient g = f.u_grad_u;
    total += ForceVec{pref * g.rho, pref * g.phi, pref * g.z};
  }
  return total;
}

double dipole_potential(const AtomSpec& atom, const PairSpec& pair, FieldSource source,
                        const CylPoint& pt, const Velocity& vel, double t,
                        const ForceOptions& opts) {
  double total = 0.0;
  for (const FieldLocal& f : contributions(pair, source, pt, t, opts)) {
    const LocalCoupling c = couple(atom, pair, f, vel, opts);
    const double base = c.detuning * c.detuning + 0.25 * atom.gamma * atom.gamma;
    total += 0.5 * kHbar * c.detuning * std::log1p(0.5 * c.rabi_sq / base);
  }
  return total;
}

void require_symmetric_doughnuts(const PairSpec& pair) {
  pair.validate();
  const BeamSpec& a = pair.beam1;
  const BeamSpec& b = pair.beam2;
  if (a.radial_p != 0 || b.radial_p != 0)
    throw DomainError("low-intensity analysis requires doughnut beams (p = 0)");
  if (std::abs(a.winding_l) != std::abs(b.winding_l))
    throw DomainError("low-intensity analysis requires equal |l|");
  if (std::abs(a.waist_w0 - b.waist_w0) > 1e-12 * a.waist_w0 ||
      std::abs(a.amp_scale - b.amp_scale) > 1e-12 * std::abs(a.amp_scale) ||
      mode_norm(a) != mode_norm(b))
    throw DomainError("low-intensity analysis requires equal waists and amplitudes");
}

namespace {

double saturation_ratio(const AtomSpec& atom, double rabi_sq) {
  const double base = atom.delta0 * atom.delta0 + 0.25 * atom.gamma * atom.gamma;
  return rabi_sq / (base + 0.5 * rabi_sq);
}

double rabi_sq_of(const AtomSpec& atom, const PairSpec& pair, const BeamSpec& beam,
                  const CylPoint& pt) {
  const double om = rabi_at(atom, mode_amplitude(beam, pt), pair.reference_amplitude);
  return om * om;
}

}  // namespace

double q_plus(const AtomSpec& atom, const PairSpec& pair, const CylPoint& pt) {
  return saturation_ratio(atom, rabi_sq_of(atom, pair, pair.beam1, pt));
}

double q_minus(const AtomSpec& atom, const PairSpec& pair, const CylPoint& pt) {
  return saturation_ratio(atom, rabi_sq_of(atom, pair, pair.beam2, pt));
}

namespace {

// Common factor (hbar Gamma k / 2) d D0 Omega^2 / (D0 + Omega^2/2)^2 with Omega
// taken from beam 1 at radius rho in the midplane (distance d/2 from its focus).
double spring_prefactor(const AtomSpec& atom, const PairSpec& pair, double rho) {
  const BeamSpec& b = pair.beam1;
  const double base = atom.delta0 * atom.delta0 + 0.25 * atom.gamma * atom.gamma;
  const double om2 = rabi_sq_of(atom, pair, b, {rho, 0.0, 0.0});
  const double denom = base + 0.5 * om2;
  return 0.5 * kHbar * atom.gamma * b.wavenumber() * pair.separation_d * base * om2 /
         (denom * denom);
}

}  // namespace

double spring_constant(const AtomSpec& atom, const PairSpec& pair, double rho) {
  require_symmetric_doughnuts(pair);
  atom.validate();
  const BeamSpec& b = pair.beam1;
  const double zr = rayleigh_range(b);
  const double s = zr * zr + 0.25 * pair.separation_d * pair.separation_d;
  const double al = std::abs(b.winding_l);
  const double bracket =
      ((al + 1.0) * s - 2.0 * rho * rho * zr * zr / (b.waist_w0 * b.waist_w0)) / (s * s);
  return spring_prefactor(atom, pair, rho) * bracket;
}

double spring_constant_k0(const AtomSpec& atom, const PairSpec& pair) {
  require_symmetric_doughnuts(pair);
  atom.validate();
  const double zr = rayleigh_range(pair.beam1);
  const double s = zr * zr + 0.25 * pair.separation_d * pair.separation_d;
  return spring_prefactor(atom, pair, central_ring_radius(pair)) / s;
}

double spring_constant_numeric(const AtomSpec& atom, const PairSpec& pair, double step) {
  require_symmetric_doughnuts(pair);
  atom.validate();
  const double h = step > 0.0 ? step : default_fd_step(pair.beam1);
  const double rho0 = central_ring_radius(pair);
  const ForceOptions opts{PhaseModel::reduced, Coupling::sum_of_beams, false};
  const ForceVec up = scattering_force(atom, pair, FieldSource::pair, {rho0, 0.0, h}, {}, 0.0, opts);
  const ForceVec dn = scattering_force(atom, pair, FieldSource::pair, {rho0, 0.0, -h}, {}, 0.0, opts);
  return -(up.z - dn.z) / (2.0 * h);
}

double harmonic_potential_v0(const AtomSpec& atom, const PairSpec& pair, double z) {
  return 0.5 * spring_constant_k0(atom, pair) * z * z;
}

double central_ring_radius(const PairSpec& pair) {
  require_symmetric_doughnuts(pair);
  const BeamSpec& b = pair.beam1;
  const double zr = rayleigh_range(b);
  const double half_d = 0.5 * pair.separation_d;
  return b.waist_w0 * std::sqrt(0.5 * std::abs(b.winding_l)) *
         std::sqrt(1.0 + half_d * half_d / (zr * zr));
}

double torque_axial(const AtomSpec& atom, const PairSpec& pair) {
  const double rho0 = central_ring_radius(pair);
  const ForceOptions opts{PhaseModel::reduced, Coupling::sum_of_beams, false};
  if (rho0 < kAxisEpsilon) return 0.0;
  const ForceVec f = scattering_force(atom, pair, FieldSource::pair, {rho0, 0.0, 0.0}, {}, 0.0, opts);
  return rho0 * f.phi;
}

double ferris_rate(const PairSpec& pair) {
  const int winding = pair.beam1.azimuthal_sign * pair.beam1.winding_l -
                      pair.beam2.azimuthal_sign * pair.beam2.winding_l;
  if (winding == 0)
    throw DomainError("azimuthal phase difference has no winding; the pattern does not rotate");
  return pair.delta_omega / winding;
}

double lift_speed(const PairSpec& pair) {
  return pair.delta_omega / (2.0 * pair.beam1.wavenumber());
}

ForceMap force_map(const AtomSpec& atom, const PairSpec& pair, const GridSpec& grid,
                   const ForceOptions& opts) {
  atom.validate();
  pair.validate();
  grid.validate();
  ForceMap map;
  map.grid = grid;
  map.force.resize(grid.size());
  parallel_for(grid.n_b, [&](std::size_t j) {
    for (std::size_t i = 0; i < grid.n_a; ++i) {
      const CylPoint pt = grid.point(i, j);
      map.force[j * grid.n_a + i] =
          scattering_force(atom, pair, FieldSource::pair, pt, {}, grid.t, opts) +
          dipole_force(atom, pair, FieldSource::pair, pt, {}, grid.t, opts);
    }
  });
  return map;
}

void write_force_map_csv(const ForceMap& map, std::ostream& out) {
  if (map.grid.plane == Plane::rho_z)
    write_csv_header(out, {"rho", "z", "f_rho", "f_phi", "f_z"});
  else
    write_csv_header(out, {"x", "y", "f_rho", "f_phi", "f_z"});
  for (std::size_t j = 0; j < map.grid.n_b; ++j)
    for (std::size_t i = 0; i < map.grid.n_a; ++i) {
      const ForceVec& f = map.force[j * map.grid.n_a + i];
      write_csv_row(out, {map.grid.a(i), map.grid.b(j), f.rho, f.phi, f.z});
    }
}

}  // namespace vl
