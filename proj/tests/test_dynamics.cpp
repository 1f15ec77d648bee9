#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "vl/dynamics.hpp"
#include "vl/errors.hpp"

using namespace vl;

namespace {

constexpr double kLambda = 589.16e-9;

PairSpec trap_pair(Handedness h = Handedness::opposite) {
  BeamSpec b;
  b.wavelength = kLambda;
  b.waist_w0 = 8e-6;
  b.winding_l = 1;
  return make_symmetric_pair(b, 1.3 * rayleigh_range(b), h);
}

IntegratorConfig scattering_only(double period, double periods) {
  IntegratorConfig c;
  c.step = period / 200.0;
  c.duration = periods * period;
  c.dipole = false;
  c.azimuthal = false;
  return c;
}

}  // namespace

TEST_CASE("state conversions") {
  const TrajectoryState s = TrajectoryState::from_cylindrical({2e-6, 0.7, -1e-6}, {0.1, 0.2, 0.3}, 1.5);
  CHECK(s.time == 1.5);
  CHECK(s.position().rho == doctest::Approx(2e-6));
  CHECK(s.position().phi == doctest::Approx(0.7));
  CHECK(s.position().z == -1e-6);
  CHECK(s.velocity().rho == doctest::Approx(0.1));
  CHECK(s.velocity().phi == doctest::Approx(0.2));
  CHECK(s.velocity().z == doctest::Approx(0.3));
  CHECK(angular_momentum_z(sodium_d2(0, 0), s) == doctest::Approx(kSodiumMass * 2e-6 * 0.2));
}

TEST_CASE("free flight") {
  const AtomSpec dark = sodium_d2(0.5, 0.0);
  const PairSpec p = trap_pair();
  IntegratorConfig c;
  c.step = 1e-6;
  c.duration = 1e-4;
  c.sample_stride = 10;
  const TrajectoryState init = TrajectoryState::from_cylindrical({5e-6, 0.0, 0.0}, {0.0, 0.01, 0.02}, 0.0);
  const std::vector<TrajectoryState> traj = integrate(dark, p, init, c);
  CHECK(traj.size() == 11);
  const TrajectoryState& end = traj.back();
  CHECK(end.time == doctest::Approx(1e-4));
  CHECK(end.r[0] == doctest::Approx(5e-6));
  CHECK(end.r[1] == doctest::Approx(1e-6));
  CHECK(end.r[2] == doctest::Approx(2e-6));
  CHECK(total_energy(dark, p, c, end) == doctest::Approx(total_energy(dark, p, c, init)));

  TrajectoryState fast = init;
  fast.v = {0.0, 0.0, 1e3};
  c.duration = 1e-2;
  CHECK_THROWS_AS(integrate(dark, p, fast, c), DivergenceError);
}

TEST_CASE("integrator preconditions") {
  const AtomSpec a = sodium_d2(0.5, 1.0);
  const PairSpec p = trap_pair();
  const double period = 2.0 * kPi / trap_frequency(a, p);
  IntegratorConfig c = scattering_only(period, 1.0);
  const TrajectoryState init = TrajectoryState::from_cylindrical({central_ring_radius(p), 0, 0}, {}, 0.0);
  c.step = period / 20.0;
  CHECK_THROWS_AS(integrate(a, p, init, c), StepSizeError);
  c.check_step = false;
  CHECK_NOTHROW(integrate(a, p, init, c));
  c.step = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = scattering_only(period, 1.0);
  c.sample_stride = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  BeamSpec b = p.beam1;
  CHECK_THROWS_AS(trap_frequency(a, make_symmetric_pair(b, 0.0)), DomainError);
}

TEST_CASE("trap frequency scaling") {
  const AtomSpec a = sodium_d2(0.5, 1.0);
  AtomSpec light = a;
  light.mass = 0.25 * a.mass;
  const PairSpec p = trap_pair();
  CHECK(trap_frequency(light, p) == doctest::Approx(2.0 * trap_frequency(a, p)));
  CHECK(trap_frequency(a, p) == doctest::Approx(std::sqrt(spring_constant_k0(a, p) / a.mass)));
}

TEST_CASE("axial oscillation about the midplane") {
  const AtomSpec a = sodium_d2(0.5, 1.0);
  const PairSpec p = trap_pair();
  const double omega = trap_frequency(a, p);
  const double period = 2.0 * kPi / omega;
  const double z0 = 1e-3 * rayleigh_range(p.beam1);
  const TrajectoryState init = TrajectoryState::from_cylindrical({central_ring_radius(p), 0, z0}, {}, 0.0);
  const auto traj = integrate(a, p, init, scattering_only(period, 6.0));
  std::vector<double> t, z;
  double zmax = 0.0;
  for (const TrajectoryState& s : traj) {
    t.push_back(s.time);
    z.push_back(s.r[2]);
    zmax = std::max(zmax, std::abs(s.r[2]));
  }
  CHECK(zmax <= z0 * (1.0 + 1e-6));
  CHECK(oscillation_frequency(t, z) == doctest::Approx(omega).epsilon(1e-3));
  // Starting on the midplane at rest stays there.
  const auto still = integrate(a, p, TrajectoryState::from_cylindrical({central_ring_radius(p), 0, 0}, {}, 0.0),
                               scattering_only(period, 1.0));
  CHECK(still.back().r[2] == 0.0);
}

TEST_CASE("orbital torque") {
  const AtomSpec a = sodium_d2(0.5, 1.0);
  const PairSpec p = trap_pair(Handedness::same);
  const double rho0 = central_ring_radius(p);
  IntegratorConfig c;
  c.dipole = false;
  const Vec3 f = cartesian_force(a, p, c, {rho0, 0.0, 0.0}, {}, 0.0);
  CHECK(rho0 * f[1] == doctest::Approx(torque_axial(a, p)).epsilon(1e-12));
  CHECK(f[2] == 0.0);

  const double period = 2.0 * kPi / trap_frequency(a, p);
  c.step = period / 200.0;
  c.duration = period;
  const auto traj = integrate(a, p, TrajectoryState::from_cylindrical({rho0, 0, 0}, {}, 0.0), c);
  double prev = angular_momentum_z(a, traj.front());
  for (const TrajectoryState& s : traj) {
    const double lz = angular_momentum_z(a, s);
    CHECK(lz >= prev);
    prev = lz;
  }
  CHECK(prev > 0.0);

  // Opposite handedness: no net torque at the midplane.
  const PairSpec q = trap_pair(Handedness::opposite);
  const Vec3 g = cartesian_force(a, q, c, {rho0, 0.0, 0.0}, {}, 0.0);
  CHECK(std::abs(g[1]) <= 1e-12 * std::abs(f[1]));
}

TEST_CASE("frequency estimate and CSV") {
  std::vector<double> t, x;
  for (int i = 0; i < 30000; ++i) {
    t.push_back(1e-3 * i);
    x.push_back(0.3 + std::sin(7.0 * t.back() + 0.2));
  }
  CHECK(oscillation_frequency(t, x) == doctest::Approx(7.0).epsilon(1e-3));
  CHECK_THROWS_AS(oscillation_frequency({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}), NumericalError);

  std::ostringstream out;
  write_trajectory_csv({TrajectoryState::from_cylindrical({1e-6, 0, 0}, {}, 0.0)}, out);
  CHECK(out.str().rfind("t,x,y,z,vx,vy,vz,rho,phi\n", 0) == 0);
}
