#include "vl/lg_mode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vl/constants.hpp"
#include "vl/errors.hpp"

namespace vl {

void BeamSpec::validate() const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw DomainError("beam wavelength must be positive, got " + std::to_string(wavelength));
  if (!(waist_w0 > 0.0) || !std::isfinite(waist_w0))
    throw DomainError("beam waist must be positive, got " + std::to_string(waist_w0));
  if (radial_p < 0) throw DomainError("radial index p must be non-negative");
  if (direction != 1 && direction != -1) throw DomainError("beam direction must be +1 or -1");
  if (azimuthal_sign != 1 && azimuthal_sign != -1)
    throw DomainError("azimuthal sign must be +1 or -1");
  if (!std::isfinite(focal_z) || !std::isfinite(amp_scale))
    throw DomainError("beam focal position and amplitude must be finite");
  if (norm_override && !(*norm_override > 0.0))
    throw DomainError("normalization override must be positive");
}

double BeamSpec::wavenumber() const { return 2.0 * kPi / wavelength; }

double BeamSpec::angular_frequency() const { return kSpeedOfLight * wavenumber(); }

double rayleigh_range(const BeamSpec& beam) {
  return kPi * beam.waist_w0 * beam.waist_w0 / beam.wavelength;
}

double waist_at(const BeamSpec& beam, double z_local) {
  const double zr = rayleigh_range(beam);
  return beam.waist_w0 * std::sqrt(1.0 + (z_local * z_local) / (zr * zr));
}

double laguerre_poly(int p, int alpha, double x) {
  if (p <= 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int n = 1; n < p; ++n) {
    const double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// d/dx L^alpha_p(x) = -L^{alpha+1}_{p-1}(x)
double laguerre_derivative(int p, int alpha, double x) {
  if (p <= 0) return 0.0;
  return -laguerre_poly(p - 1, alpha + 1, x);
}

// Radial factor without the Laguerre polynomial:
//   amp * C * (w0/w) * (sqrt2 rho / w)^|l| * exp(-rho^2/w^2)
// evaluated in log space so that large |l| neither overflows nor underflows early.
double envelope(const BeamSpec& beam, double rho, double w) {
  if (beam.amp_scale == 0.0) return 0.0;
  const int al = std::abs(beam.winding_l);
  if (al > 0 && rho <= 0.0) return 0.0;
  double log_env = std::log(std::abs(beam.amp_scale)) + std::log(mode_norm(beam)) +
                   std::log(beam.waist_w0 / w) - (rho * rho) / (w * w);
  if (al > 0) log_env += al * std::log(std::sqrt(2.0) * rho / w);
  const double v = std::exp(log_env);
  return beam.amp_scale < 0.0 ? -v : v;
}

}  // namespace

double mode_norm(const BeamSpec& beam) {
  if (beam.norm_override) return *beam.norm_override;
  const int al = std::abs(beam.winding_l);
  return std::exp(0.5 * (std::lgamma(beam.radial_p + 1.0) - std::lgamma(beam.radial_p + al + 1.0)));
}

double mode_amplitude(const BeamSpec& beam, const CylPoint& pt) {
  const double zl = beam.local_z(pt.z);
  const double w = waist_at(beam, zl);
  const double env = envelope(beam, pt.rho, w);
  if (env == 0.0) return 0.0;
  const int al = std::abs(beam.winding_l);
  return env * laguerre_poly(beam.radial_p, al, 2.0 * pt.rho * pt.rho / (w * w));
}

Gradient mode_amplitude_gradient(const BeamSpec& beam, const CylPoint& pt) {
  const double zl = beam.local_z(pt.z);
  const double zr = rayleigh_range(beam);
  const double w = waist_at(beam, zl);
  const double w2 = w * w;
  const double rho = pt.rho;
  const int al = std::abs(beam.winding_l);
  const int p = beam.radial_p;
  const double x = 2.0 * rho * rho / w2;
  const double lag = laguerre_poly(p, al, x);
  const double dlag = laguerre_derivative(p, al, x);
  const double env = envelope(beam, rho, w);

  // d(env)/d(rho); on axis only |l| = 1 has a non-zero slope.
  double denv_drho = 0.0;
  if (rho > 0.0) {
    denv_drho = env * (al / rho - 2.0 * rho / w2);
  } else if (al == 1) {
    denv_drho = beam.amp_scale * mode_norm(beam) * (beam.waist_w0 / w) * std::sqrt(2.0) / w;
  }

  Gradient g;
  g.rho = denv_drho * lag + env * dlag * 4.0 * rho / w2;

  // d/d(w^2) at fixed rho, then chain through w^2(z_local).
  const double denv_dw2 = env * (-(1.0 + al) / (2.0 * w2) + rho * rho / (w2 * w2));
  const double du_dw2 = denv_dw2 * lag - env * dlag * 2.0 * rho * rho / (w2 * w2);
  const double dw2_dzl = 2.0 * beam.waist_w0 * beam.waist_w0 * zl / (zr * zr);
  g.z = beam.direction * du_dw2 * dw2_dzl;
  return g;
}

PhaseTerms mode_phase_terms(const BeamSpec& beam, const CylPoint& pt, double t) {
  const double k = beam.wavenumber();
  const double zr = rayleigh_range(beam);
  const double zl = beam.local_z(pt.z);
  const int al = std::abs(beam.winding_l);
  PhaseTerms terms;
  // Remove whole wavelengths exactly (fma) so that |plane| <= pi. The unreduced
  // k z reaches 10^4 rad within a few Rayleigh ranges, where one ulp already
  // exceeds 1e-12 rad.
  const double cycles = std::nearbyint(zl / beam.wavelength);
  terms.plane = k * std::fma(-cycles, beam.wavelength, zl);
  terms.azimuthal = beam.azimuthal_sign * beam.winding_l * pt.phi;
  terms.gouy = -(2.0 * beam.radial_p + al + 1.0) * std::atan(zl / zr);
  terms.curvature = k * pt.rho * pt.rho * zl / (2.0 * (zl * zl + zr * zr));
  terms.time = beam.angular_frequency() * t;
  return terms;
}

double mode_phase(const BeamSpec& beam, const CylPoint& pt, double t) {
  return mode_phase_terms(beam, pt, t).total();
}

Gradient mode_phase_gradient(const BeamSpec& beam, const CylPoint& pt, PhaseModel model) {
  const double k = beam.wavenumber();
  Gradient g;
  g.z = beam.direction * k;
  if (pt.rho >= kAxisEpsilon) g.phi = beam.azimuthal_sign * beam.winding_l / pt.rho;
  if (model == PhaseModel::reduced) return g;

  const double zr = rayleigh_range(beam);
  const double zl = beam.local_z(pt.z);
  const double s = zl * zl + zr * zr;
  const double order = 2.0 * beam.radial_p + std::abs(beam.winding_l) + 1.0;
  const double dgouy = -order * zr / s;
  const double dcurv = 0.5 * k * pt.rho * pt.rho * (zr * zr - zl * zl) / (s * s);
  g.z += beam.direction * (dgouy + dcurv);
  g.rho = k * pt.rho * zl / s;
  return g;
}

double principal_value(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

FieldSample mode_field(const BeamSpec& beam, const CylPoint& pt, double t) {
  const double u = mode_amplitude(beam, pt);
  double phase = mode_phase(beam, pt, t);
  if (u < 0.0) phase += kPi;
  FieldSample s;
  s.amplitude = std::abs(u);
  s.phase = principal_value(phase);
  s.complex_value = std::polar(s.amplitude, s.phase);
  return s;
}

namespace {

// Slowly varying envelope at local Cartesian (x, y, z_local): the mode without
// its plane-wave and time factors.
std::complex<double> envelope(const BeamSpec& beam, double x, double y, double zl) {
  const CylPoint pt{std::hypot(x, y), std::atan2(y, x), beam.focal_z + beam.direction * zl};
  const PhaseTerms ph = mode_phase_terms(beam, pt, 0.0);
  return mode_amplitude(beam, pt) * std::polar(1.0, ph.azimuthal + ph.gouy + ph.curvature);
}

template <class F>
std::complex<double> d1(F f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

template <class F>
std::complex<double> d2(F f, double h) {
  return (-f(-2.0 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2.0 * h)) / (12.0 * h * h);
}

}  // namespace

double paraxial_residual(const BeamSpec& beam) {
  beam.validate();
  const double k = beam.wavenumber();
  const double zr = rayleigh_range(beam);
  const double hx = beam.waist_w0 / 50.0;
  const double hz = zr / 100.0;
  const double ring = std::sqrt(1.0 + 0.5 * std::abs(beam.winding_l) + beam.radial_p);
  double worst = 0.0;
  double scale = 0.0;
  for (double zf : {-1.7, -0.9, -0.3, 0.0, 0.45, 1.1, 1.9}) {
    const double zl = zf * zr;
    const double w = waist_at(beam, zl);
    for (int ir = 0; ir <= 12; ++ir) {
      const double rho = 2.5 * ring * w * ir / 12.0;
      for (double phi : {0.0, 0.7, 2.1, 4.4}) {
        const double x = rho * std::cos(phi);
        const double y = rho * std::sin(phi);
        const auto lap = d2([&](double s) { return envelope(beam, x + s, y, zl); }, hx) +
                         d2([&](double s) { return envelope(beam, x, y + s, zl); }, hx);
        const auto dz = std::complex<double>(0.0, 2.0 * k) *
                        d1([&](double s) { return envelope(beam, x, y, zl + s); }, hz);
        worst = std::max(worst, std::abs(lap + dz));
        scale = std::max(scale, std::abs(dz));
      }
    }
  }
  if (!(scale > 0.0)) throw NumericalError("paraxial residual: field vanishes on the sample set");
  return worst / scale;
}

}  // namespace vl
