#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "vl/constants.hpp"
#include "vl/errors.hpp"
#include "vl/superpose.hpp"

using namespace vl;

namespace {

constexpr double kLambda = 589.16e-9;

BeamSpec doughnut(double w0, int l) {
  BeamSpec b;
  b.wavelength = kLambda;
  b.waist_w0 = w0;
  b.winding_l = l;
  return b;
}

PairSpec fig3() {
  const BeamSpec b = doughnut(6.0 * kLambda, 80);
  return make_symmetric_pair(b, 24.0 * b.waist_w0);
}

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

TEST_CASE("pair geometry and validation") {
  const PairSpec p = fig3();
  CHECK(p.beam1.focal_z == doctest::Approx(-0.5 * p.separation_d));
  CHECK(p.beam2.focal_z == doctest::Approx(0.5 * p.separation_d));
  CHECK(p.beam1.direction == 1);
  CHECK(p.beam2.direction == -1);
  CHECK(p.beam2.azimuthal_sign == -1);
  PairSpec bad = p;
  bad.beam2.wavelength *= 1.01;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.beam1.focal_z = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(make_pair(p.beam1, p.beam2, -1e-6), DomainError);
}

TEST_CASE("phase difference") {
  SUBCASE("origin") {
    const PairSpec p = make_symmetric_pair(doughnut(8e-6, 3), 1e-4);
    const PhaseDifference d = phase_difference(p, {0.0, 0.7, 0.0});
    CHECK(d.total == doctest::Approx(6.0 * 0.7));
    CHECK(d.plane == 0.0);
    CHECK(d.gouy == 0.0);
    CHECK(d.curvature == 0.0);
  }
  SUBCASE("coincident foci on axis") {
    const BeamSpec b = doughnut(8e-6, 4);
    const PairSpec p = make_symmetric_pair(b, 0.0);
    const double zr = rayleigh_range(b);
    const double z = 0.37 * zr;
    const PhaseDifference d = phase_difference(p, {0.0, 0.0, z});
    CHECK(wrap(d.total - (2.0 * b.wavenumber() * z - 10.0 * std::atan(z / zr))) ==
          doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("per-beam subtraction, l = 80 lattice") {
    const PairSpec p = fig3();
    const CylPoint pt{p.beam1.waist_w0 * std::sqrt(40.0) * std::sqrt(1.0 + std::pow(0.5 * p.separation_d / rayleigh_range(p.beam1), 2)), 0.0, 0.1 * rayleigh_range(p.beam1)};
    const double direct = mode_phase(p.beam1, pt, 0.0) - mode_phase(p.beam2, pt, 0.0);
    CHECK(wrap(phase_difference(p, pt).total - direct) == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("reduced model keeps only plane and azimuthal parts") {
    const PairSpec p = fig3();
    const CylPoint pt{4e-5, 0.3, 2e-5};
    const PhaseDifference full = phase_difference(p, pt, PhaseModel::full);
    const PhaseDifference red = phase_difference(p, pt, PhaseModel::reduced);
    CHECK(red.total == doctest::Approx(full.plane + full.azimuthal));
    CHECK(full.total == doctest::Approx(full.plane + full.azimuthal + full.gouy + full.curvature));
  }
}

TEST_CASE("Gouy difference closed forms") {
  const BeamSpec b = doughnut(6.0 * kLambda, 80);
  const double zr = rayleigh_range(b);
  const double d = 24.0 * b.waist_w0;
  const PairSpec p = make_symmetric_pair(b, d);
  for (double zf : {-0.4, -0.1, 0.0, 0.05, 0.3}) {
    const double z = zf * zr;
    const double exact = phase_difference(p, {1e-5, 0.0, z}).gouy;
    CHECK(gouy_difference_identity(80, z, d, zr) == doctest::Approx(exact).epsilon(1e-12));
  }
  // The single-arctangent closed form agrees only at z = 0.
  CHECK(gouy_difference_closed_form(80, 0.0, d, zr) == 0.0);
  const double z = 0.2 * zr;
  CHECK(std::abs(gouy_difference_closed_form(80, z, d, zr) - gouy_difference_identity(80, z, d, zr)) > 0.1);
}

TEST_CASE("curvature difference closed form") {
  const BeamSpec b = doughnut(20.0 * kLambda, 2);
  const double zr = rayleigh_range(b);
  const double k = b.wavenumber();
  const double rho = 1.5 * b.waist_w0;
  auto f = [&](double u) { return u / (u * u + zr * zr); };
  for (double d : {0.02 * zr, 0.01 * zr}) {
    const PairSpec p = make_symmetric_pair(b, d);
    // Each beam in its own frame: the exact difference is odd in z and vanishes at z = 0.
    CHECK(phase_difference(p, {rho, 0.0, 0.0}).curvature == doctest::Approx(0.0).scale(1e-12));
    const double z = 0.3 * zr;
    CHECK(phase_difference(p, {rho, 0.0, z}).curvature ==
          doctest::Approx(0.5 * k * rho * rho * (f(z + 0.5 * d) - f(0.5 * d - z))).epsilon(1e-10));
    // The closed form kρ²d/(2(z²+zR²)) is the first-order term of the co-oriented
    // difference (both beams measured along +z) at the midplane.
    const double co = 0.5 * k * rho * rho * (f(0.5 * d) - f(-0.5 * d));
    const double closed = curvature_difference_closed_form(k, rho, 0.0, d, zr);
    CHECK(std::abs(closed - co) / co <= (d / zr) * (d / zr));
  }
}

TEST_CASE("total amplitude and phase") {
  SUBCASE("single-beam limit") {
    PairSpec p = fig3();
    p.beam2.amp_scale = 0.0;
    const CylPoint pt{4.2e-5, 1.1, 3e-6};
    CHECK(total_amplitude(p, pt, 0.0) == doctest::Approx(mode_amplitude(p.beam1, pt)).epsilon(1e-14));
    CHECK(wrap(*total_phase(p, pt, 0.0) - mode_phase(p.beam1, pt, 0.0)) == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("dark fringe") {
    const PairSpec p = make_symmetric_pair(doughnut(8e-6, 2), 0.0);
    const CylPoint pt{8e-6, 0.0, 0.25 * kLambda};
    CHECK(total_amplitude(p, pt, 0.0, PhaseModel::reduced) <= 1e-15 * mode_amplitude(p.beam1, pt));
    CHECK_FALSE(total_phase(p, pt, 0.0, PhaseModel::reduced).has_value());
  }
  SUBCASE("bright fringe doubles the amplitude") {
    const PairSpec p = make_symmetric_pair(doughnut(8e-6, 2), 0.0);
    const CylPoint pt{8e-6, 0.0, 0.0};
    CHECK(total_amplitude(p, pt, 0.0) == doctest::Approx(2.0 * mode_amplitude(p.beam1, pt)));
  }
  SUBCASE("envelope bounds and complex sum") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const PairSpec p = fig3();
    const double zr = rayleigh_range(p.beam1);
    for (int n = 0; n < 2000; ++n) {
      const CylPoint pt{7e-5 * u(rng), 2.0 * kPi * u(rng), zr * (2.0 * u(rng) - 1.0)};
      const double u1 = mode_amplitude(p.beam1, pt), u2 = mode_amplitude(p.beam2, pt);
      if (u1 + u2 < 1e-100) continue;  // deep in the dark core: only underflow left to test
      const double tot = total_amplitude(p, pt, 0.0);
      CHECK(tot >= std::abs(u1 - u2) - 1e-12 * (u1 + u2));
      CHECK(tot <= (u1 + u2) * (1.0 + 4e-16));
      const std::complex<double> sum = mode_field(p.beam1, pt, 0.0).complex_value +
                                       mode_field(p.beam2, pt, 0.0).complex_value;
      CHECK(std::abs(std::abs(sum) - tot) <= 1e-12 * (u1 + u2));
      CHECK(std::abs(pair_field(p, pt, 0.0) - sum) <= 1e-12 * (u1 + u2));
    }
  }
}

TEST_CASE("pattern symmetries") {
  BeamSpec b = doughnut(6.0 * kLambda, 3);
  PairSpec p = make_symmetric_pair(b, 10.0 * b.waist_w0, Handedness::opposite, 2.0 * kPi * 500.0);
  const double zr = rayleigh_range(b);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const double rho = 3.0 * b.waist_w0 * u(rng), phi = 2.0 * kPi * u(rng), z = zr * (u(rng) - 0.5);
    const double t = 1e-4 * u(rng);
    auto I = [&](double f, double zz, double tt) {
      const double a = total_amplitude(p, {rho, f, zz}, tt);
      return a * a;
    };
    const double i0 = I(phi, z, t);
    const double scale = std::pow(mode_amplitude(p.beam1, {rho, 0, z}) + mode_amplitude(p.beam2, {rho, 0, z}), 2);
    // Periodic in phi with period 2 pi / (l1 + l2).
    CHECK(std::abs(I(phi + 2.0 * kPi / 6.0, z, t) - i0) <= 1e-12 * scale);
    // Rigid rotation at delta_omega / (l1 + l2).
    CHECK(std::abs(I(phi - p.delta_omega * t / 6.0, z, 0.0) - i0) <= 1e-12 * scale);
    // Mirror: I(rho, phi, z) = I(rho, -phi, -z) for equal beams at equal times.
    CHECK(std::abs(I(-phi, -z, 0.0) - I(phi, z, 0.0)) <= 1e-12 * scale);
  }
}

TEST_CASE("local field data matches finite differences") {
  const BeamSpec b = doughnut(5.0 * kLambda, 2);
  const PairSpec p = make_symmetric_pair(b, 0.8 * rayleigh_range(b), Handedness::opposite, 300.0);
  const double t = 1e-4;
  for (const PhaseModel model : {PhaseModel::full, PhaseModel::reduced}) {
    for (const CylPoint pt : {CylPoint{2.1e-6, 0.4, 3e-7}, CylPoint{4e-6, 2.5, -5e-6}}) {
      const FieldLocal f = pair_local(p, pt, t, model);
      auto E = [&](CylPoint q) { return pair_field(p, q, t, model); };
      const double h = 1e-10;
      auto grad = [&](auto shift) { return (E(shift(h)) - E(shift(-h))) / (2.0 * h); };
      const std::complex<double> e = E(pt);
      const std::complex<double> gr = grad([&](double s) { return CylPoint{pt.rho + s, pt.phi, pt.z}; });
      const std::complex<double> gf = grad([&](double s) { return CylPoint{pt.rho, pt.phi + s / pt.rho, pt.z}; });
      const std::complex<double> gz = grad([&](double s) { return CylPoint{pt.rho, pt.phi, pt.z + s}; });
      // U grad U = Re(conj(E) grad E), U^2 grad Theta = Im(conj(E) grad E).
      const double scale = std::norm(e) * b.wavenumber();
      CHECK(f.amp_sq == doctest::Approx(std::norm(e)).epsilon(1e-12));
      CHECK(std::abs(f.u_grad_u.rho - std::real(std::conj(e) * gr)) <= 1e-6 * scale);
      CHECK(std::abs(f.u_grad_u.phi - std::real(std::conj(e) * gf)) <= 1e-6 * scale);
      CHECK(std::abs(f.u_grad_u.z - std::real(std::conj(e) * gz)) <= 1e-6 * scale);
      CHECK(std::abs(f.amp_sq_grad_phase.rho - std::imag(std::conj(e) * gr)) <= 1e-6 * scale);
      CHECK(std::abs(f.amp_sq_grad_phase.phi - std::imag(std::conj(e) * gf)) <= 1e-6 * scale);
      CHECK(std::abs(f.amp_sq_grad_phase.z - std::imag(std::conj(e) * gz)) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("intensity maps") {
  const BeamSpec b = doughnut(8e-6, 2);
  const PairSpec p = make_symmetric_pair(b, 0.0);
  SUBCASE("coincident foci, midplane slice is one doughnut of radius w0") {
    GridSpec g{Plane::xy, -2e-5, 2e-5, 401, -2e-5, 2e-5, 401, 0.0, 0.0};
    const FieldMap m = intensity_map(p, g);
    CHECK(m.intensity.size() == g.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < m.intensity.size(); ++i) {
      CHECK(m.intensity[i] == doctest::Approx(m.amplitude[i] * m.amplitude[i]));
      if (m.intensity[i] > m.intensity[best]) best = i;
    }
    const CylPoint at = g.point(best % g.n_a, best / g.n_a);
    CHECK(std::abs(at.rho - b.waist_w0) <= g.da() * std::sqrt(2.0));
  }
  SUBCASE("layout and CSV") {
    GridSpec g{Plane::rho_z, 0.0, 1e-5, 3, -1e-6, 1e-6, 2, 0.0, 0.0};
    const FieldMap m = intensity_map(p, g);
    CHECK(m.index(2, 1) == 5);
    CHECK(std::isnan(m.phase[m.index(0, 0)]));  // on axis: dark
    std::ostringstream out;
    write_field_map_csv(m, out);
    const std::string s = out.str();
    CHECK(s.rfind("rho,z,amplitude,phase,intensity\n", 0) == 0);
    CHECK(s.find(",nan,") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 7);
  }
  SUBCASE("grid validation") {
    GridSpec g{Plane::rho_z, 1e-5, 0.0, 3, 0.0, 1e-6, 2, 0.0, 0.0};
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = GridSpec{Plane::rho_z, -1e-5, 1e-5, 3, 0.0, 1e-6, 2, 0.0, 0.0};
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = GridSpec{Plane::xy, -1e-5, 1e-5, 0, 0.0, 1e-6, 2, 0.0, 0.0};
    CHECK_THROWS_AS(g.validate(), DomainError);
  }
}
