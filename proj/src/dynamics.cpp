#include "vl/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "vl/constants.hpp"
#include "vl/csv.hpp"
#include "vl/errors.hpp"

namespace vl {

namespace {

Vec3 axpy(const Vec3& x, double a, const Vec3& y) {
  return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
}

ForceVec cylindrical_force(const AtomSpec& atom, const PairSpec& pair, const IntegratorConfig& cfg,
                           const CylPoint& pt, const Velocity& vel, double t) {
  ForceVec f;
  if (cfg.scattering) f += scattering_force(atom, pair, FieldSource::pair, pt, vel, t, cfg.force);
  if (cfg.dipole) f += dipole_force(atom, pair, FieldSource::pair, pt, vel, t, cfg.force);
  if (!cfg.azimuthal || pt.rho < kAxisEpsilon) f.phi = 0.0;
  return f;
}

}  // namespace

CylPoint TrajectoryState::position() const {
  const double rho = std::hypot(r[0], r[1]);
  return {rho, rho < kAxisEpsilon ? 0.0 : std::atan2(r[1], r[0]), r[2]};
}

Velocity TrajectoryState::velocity() const {
  const CylPoint p = position();
  const double c = std::cos(p.phi);
  const double s = std::sin(p.phi);
  return {v[0] * c + v[1] * s, -v[0] * s + v[1] * c, v[2]};
}

TrajectoryState TrajectoryState::from_cylindrical(const CylPoint& pos, const Velocity& vel, double t) {
  const double c = std::cos(pos.phi);
  const double s = std::sin(pos.phi);
  TrajectoryState st;
  st.time = t;
  st.r = {pos.rho * c, pos.rho * s, pos.z};
  st.v = {vel.rho * c - vel.phi * s, vel.rho * s + vel.phi * c, vel.z};
  return st;
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("integrator step must be positive");
  if (!(duration >= step)) throw ConfigError("integrator duration must be at least one step");
  if (sample_stride == 0) throw ConfigError("sample stride must be at least 1");
}

Vec3 cartesian_force(const AtomSpec& atom, const PairSpec& pair, const IntegratorConfig& cfg,
                     const Vec3& r, const Vec3& v, double t) {
  TrajectoryState s;
  s.r = r;
  s.v = v;
  const CylPoint pt = s.position();
  const ForceVec f = cylindrical_force(atom, pair, cfg, pt, s.velocity(), t);
  const double c = std::cos(pt.phi);
  const double sn = std::sin(pt.phi);
  return {f.rho * c - f.phi * sn, f.rho * sn + f.phi * c, f.z};
}

double beam_extent(const PairSpec& pair) {
  double extent = 0.5 * pair.separation_d;
  for (const BeamSpec* b : {&pair.beam1, &pair.beam2}) {
    const double zr = rayleigh_range(*b);
    const double ring = b->waist_w0 * std::max(1.0, std::sqrt(0.5 * std::abs(b->winding_l)));
    const double far = pair.separation_d / zr;
    extent = std::max({extent, zr, ring * std::sqrt(1.0 + far * far)});
  }
  return extent;
}

double trap_frequency(const AtomSpec& atom, const PairSpec& pair) {
  const double k0 = spring_constant_k0(atom, pair);
  if (!(k0 > 0.0)) throw DomainError("no axial trap: K0 <= 0 (focal planes must be separated)");
  return std::sqrt(k0 / atom.mass);
}

std::vector<TrajectoryState> integrate(const AtomSpec& atom, const PairSpec& pair,
                                       const TrajectoryState& init, const IntegratorConfig& cfg) {
  atom.validate();
  pair.validate();
  cfg.validate();
  if (cfg.check_step && pair.separation_d > 0.0) {
    double omega = 0.0;
    try {
      omega = trap_frequency(atom, pair);
    } catch (const ConfigError&) {
      omega = 0.0;  // no analytic trap estimate for this pair
    }
    if (omega > 0.0 && cfg.step > 2.0 * kPi / (50.0 * omega)) {
      std::ostringstream msg;
      msg << "integrator step " << cfg.step << " s exceeds 1/50 of the trap period; use step <= "
          << 2.0 * kPi / (50.0 * omega) << " s";
      throw StepSizeError(msg.str());
    }
  }

  const double limit = 10.0 * beam_extent(pair);
  const double inv_m = 1.0 / atom.mass;
  const double h = cfg.step;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / h));
  auto accel = [&](const Vec3& r, const Vec3& v, double t) {
    const Vec3 f = cartesian_force(atom, pair, cfg, r, v, t);
    return Vec3{f[0] * inv_m, f[1] * inv_m, f[2] * inv_m};
  };

  std::vector<TrajectoryState> out;
  out.reserve(n_steps / cfg.sample_stride + 2);
  out.push_back(init);
  TrajectoryState s = init;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double t = s.time;
    const Vec3 a1 = accel(s.r, s.v, t);
    const Vec3 r2 = axpy(s.r, 0.5 * h, s.v), v2 = axpy(s.v, 0.5 * h, a1);
    const Vec3 a2 = accel(r2, v2, t + 0.5 * h);
    const Vec3 r3 = axpy(s.r, 0.5 * h, v2), v3 = axpy(s.v, 0.5 * h, a2);
    const Vec3 a3 = accel(r3, v3, t + 0.5 * h);
    const Vec3 r4 = axpy(s.r, h, v3), v4 = axpy(s.v, h, a3);
    const Vec3 a4 = accel(r4, v4, t + h);
    for (int k = 0; k < 3; ++k) {
      s.r[k] += h / 6.0 * (s.v[k] + 2.0 * v2[k] + 2.0 * v3[k] + v4[k]);
      s.v[k] += h / 6.0 * (a1[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]);
    }
    s.time = init.time + static_cast<double>(n) * h;

    const double radius = std::sqrt(s.r[0] * s.r[0] + s.r[1] * s.r[1] + s.r[2] * s.r[2]);
    if (!std::isfinite(radius) || radius > limit) {
      std::ostringstream msg;
      msg << "trajectory diverged at t = " << s.time << " s (|r| = " << radius << " m)";
      throw DivergenceError(msg.str());
    }
    if (n % cfg.sample_stride == 0 || n == n_steps) out.push_back(s);
  }
  return out;
}

double total_energy(const AtomSpec& atom, const PairSpec& pair, const IntegratorConfig& cfg,
                    const TrajectoryState& s) {
  const double kinetic = 0.5 * atom.mass * (s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]);
  if (!cfg.dipole) return kinetic;
  return kinetic +
         dipole_potential(atom, pair, FieldSource::pair, s.position(), s.velocity(), s.time, cfg.force);
}

double angular_momentum_z(const AtomSpec& atom, const TrajectoryState& s) {
  return atom.mass * (s.r[0] * s.v[1] - s.r[1] * s.v[0]);
}

double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& x) {
  if (t.size() != x.size() || t.size() < 3) throw DomainError("need matching samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> crossings;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double a = x[i - 1] - mean;
    const double b = x[i] - mean;
    if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
      crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
    }
  }
  if (crossings.size() < 3) throw NumericalError("too few oscillations to measure a frequency");
  // Crossings of the mean are half a period apart.
  const double span = crossings.back() - crossings.front();
  return kPi * static_cast<double>(crossings.size() - 1) / span;
}

void write_trajectory_csv(const std::vector<TrajectoryState>& traj, std::ostream& out) {
  write_csv_header(out, {"t", "x", "y", "z", "vx", "vy", "vz", "rho", "phi"});
  for (const TrajectoryState& s : traj) {
    const CylPoint p = s.position();
    write_csv_row(out, {s.time, s.r[0], s.r[1], s.r[2], s.v[0], s.v[1], s.v[2], p.rho, p.phi});
  }
}

}  // namespace vl
