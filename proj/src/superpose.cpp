#include "vl/superpose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vl/constants.hpp"
#include "vl/csv.hpp"
#include "vl/errors.hpp"
#include "vl/parallel.hpp"

namespace vl {

void PairSpec::validate() const {
  beam1.validate();
  beam2.validate();
  if (!(separation_d >= 0.0) || !std::isfinite(separation_d))
    throw DomainError("focal separation d must be >= 0");
  if (beam1.direction != 1 || beam2.direction != -1)
    throw DomainError("beam 1 must travel towards +z and beam 2 towards -z");
  const double tol = 1e-12 * std::max(1.0, separation_d);
  if (std::abs(beam1.focal_z + 0.5 * separation_d) > tol ||
      std::abs(beam2.focal_z - 0.5 * separation_d) > tol)
    throw DomainError("beam focal planes must sit at -d/2 and +d/2");
  if (std::abs(beam1.wavelength - beam2.wavelength) > 1e-12 * beam1.wavelength)
    throw DomainError("paired beams must share one wavelength (use delta_omega/delta_k for offsets)");
  if (!std::isfinite(delta_omega) || !std::isfinite(delta_k))
    throw DomainError("frequency and wavenumber offsets must be finite");
  if (!(reference_amplitude > 0.0)) throw DomainError("reference amplitude must be positive");
}

PairSpec make_pair(BeamSpec beam1, BeamSpec beam2, double separation_d, double delta_omega,
                   double delta_k) {
  beam1.direction = +1;
  beam1.focal_z = -0.5 * separation_d;
  beam2.direction = -1;
  beam2.focal_z = +0.5 * separation_d;
  PairSpec pair{beam1, beam2, separation_d, delta_omega, delta_k, 1.0};
  pair.validate();
  return pair;
}

PairSpec make_symmetric_pair(const BeamSpec& base, double separation_d, Handedness handedness,
                             double delta_omega) {
  BeamSpec b1 = base;
  BeamSpec b2 = base;
  b1.azimuthal_sign = +1;
  b2.azimuthal_sign = handedness == Handedness::opposite ? -1 : +1;
  return make_pair(b1, b2, separation_d, delta_omega);
}

PhaseTerms pair_beam_phase_terms(const PairSpec& pair, BeamIndex which, const CylPoint& pt,
                                 double t) {
  if (which == BeamIndex::first) return mode_phase_terms(pair.beam1, pt, 0.0);
  PhaseTerms terms = mode_phase_terms(pair.beam2, pt, 0.0);
  terms.time = pair.delta_k * pt.z + pair.delta_omega * t;
  return terms;
}

namespace {

double model_total(const PhaseTerms& t, PhaseModel model) {
  if (model == PhaseModel::full) return t.total();
  return t.plane + t.azimuthal + t.time;
}

// Cosine argument Theta1 - Theta2 - dk z - dw t.
double interference_argument(const PairSpec& pair, const CylPoint& pt, double t,
                             PhaseModel model) {
  return phase_difference(pair, pt, model).total - pair.delta_k * pt.z - pair.delta_omega * t;
}

double combine_amplitudes(double u1, double u2, double delta) {
  // U^2 = (U1-U2)^2 + 4 U1 U2 cos^2(delta/2) = (U1+U2)^2 - 4 U1 U2 sin^2(delta/2)
  double u_sq;
  const double prod = u1 * u2;
  if (prod >= 0.0) {
    const double c = std::cos(0.5 * delta);
    u_sq = (u1 - u2) * (u1 - u2) + 4.0 * prod * c * c;
  } else {
    const double s = std::sin(0.5 * delta);
    u_sq = (u1 + u2) * (u1 + u2) - 4.0 * prod * s * s;
  }
  return std::sqrt(std::max(0.0, u_sq));
}

}  // namespace

PhaseDifference phase_difference(const PairSpec& pair, const CylPoint& pt, PhaseModel model) {
  const PhaseTerms t1 = mode_phase_terms(pair.beam1, pt, 0.0);
  const PhaseTerms t2 = mode_phase_terms(pair.beam2, pt, 0.0);
  PhaseDifference d;
  d.plane = t1.plane - t2.plane;
  d.azimuthal = t1.azimuthal - t2.azimuthal;
  d.gouy = t1.gouy - t2.gouy;
  d.curvature = t1.curvature - t2.curvature;
  d.total = d.plane + d.azimuthal;
  if (model == PhaseModel::full) d.total += d.gouy + d.curvature;
  return d;
}

double total_amplitude(const PairSpec& pair, const CylPoint& pt, double t, PhaseModel model) {
  const double u1 = mode_amplitude(pair.beam1, pt);
  const double u2 = mode_amplitude(pair.beam2, pt);
  return combine_amplitudes(u1, u2, interference_argument(pair, pt, t, model));
}

std::optional<double> total_phase(const PairSpec& pair, const CylPoint& pt, double t,
                                  PhaseModel model) {
  const double u1 = mode_amplitude(pair.beam1, pt);
  const double u2 = mode_amplitude(pair.beam2, pt);
  const double scale = std::abs(u1) + std::abs(u2);
  if (scale == 0.0) return std::nullopt;
  const double u = combine_amplitudes(u1, u2, interference_argument(pair, pt, t, model));
  if (u <= kDarkPhaseFraction * scale) return std::nullopt;
  const double th1 = model_total(pair_beam_phase_terms(pair, BeamIndex::first, pt, t), model);
  const double th2 = model_total(pair_beam_phase_terms(pair, BeamIndex::second, pt, t), model);
  return std::atan2(u1 * std::sin(th1) + u2 * std::sin(th2), u1 * std::cos(th1) + u2 * std::cos(th2));
}

std::complex<double> pair_field(const PairSpec& pair, const CylPoint& pt, double t,
                                PhaseModel model) {
  const double u1 = mode_amplitude(pair.beam1, pt);
  const double u2 = mode_amplitude(pair.beam2, pt);
  const double th1 = model_total(pair_beam_phase_terms(pair, BeamIndex::first, pt, t), model);
  const double th2 = model_total(pair_beam_phase_terms(pair, BeamIndex::second, pt, t), model);
  return u1 * std::polar(1.0, th1) + u2 * std::polar(1.0, th2);
}

bool FieldLocal::dark(double fraction) const {
  return amp_scale == 0.0 || std::sqrt(amp_sq) <= fraction * amp_scale;
}

Gradient FieldLocal::phase_gradient_or_zero() const {
  if (amp_sq <= 0.0) return {};
  return amp_sq_grad_phase * (1.0 / amp_sq);
}

FieldLocal beam_local(const BeamSpec& beam, const CylPoint& pt, PhaseModel model) {
  const double u = mode_amplitude(beam, pt);
  FieldLocal f;
  f.amp_sq = u * u;
  f.amp_scale = std::abs(u);
  f.u_grad_u = mode_amplitude_gradient(beam, pt) * u;
  f.amp_sq_grad_phase = mode_phase_gradient(beam, pt, model) * f.amp_sq;
  return f;
}

FieldLocal pair_beam_local(const PairSpec& pair, BeamIndex which, const CylPoint& pt,
                           PhaseModel model) {
  return beam_local(which == BeamIndex::first ? pair.beam1 : pair.beam2, pt, model);
}

FieldLocal pair_local(const PairSpec& pair, const CylPoint& pt, double t, PhaseModel model) {
  const double u1 = mode_amplitude(pair.beam1, pt);
  const double u2 = mode_amplitude(pair.beam2, pt);
  const Gradient gu1 = mode_amplitude_gradient(pair.beam1, pt);
  const Gradient gu2 = mode_amplitude_gradient(pair.beam2, pt);
  const Gradient gt1 = mode_phase_gradient(pair.beam1, pt, model);
  Gradient gt2 = mode_phase_gradient(pair.beam2, pt, model);
  gt2.z += pair.delta_k;
  const double delta = interference_argument(pair, pt, t, model);
  const double c = std::cos(delta);
  const double s = std::sin(delta);

  FieldLocal f;
  f.amp_scale = std::abs(u1) + std::abs(u2);
  const double u = combine_amplitudes(u1, u2, delta);
  f.amp_sq = u * u;
  // Re(conj(E) grad E) and Im(conj(E) grad E) expanded in beam quantities.
  f.u_grad_u = gu1 * u1 + gu2 * u2 + (gu1 * u2 + gu2 * u1) * c - (gt1 - gt2) * (u1 * u2 * s);
  f.amp_sq_grad_phase =
      gt1 * (u1 * u1) + gt2 * (u2 * u2) + (gt1 + gt2) * (u1 * u2 * c) + (gu1 * u2 - gu2 * u1) * s;
  return f;
}

double gouy_difference_identity(int l, double z, double d, double zr) {
  const double order = std::abs(l) + 1.0;
  return -order * std::atan2(2.0 * z * zr, zr * zr - z * z + 0.25 * d * d);
}

double gouy_difference_closed_form(int l, double z, double d, double zr) {
  const double order = std::abs(l) + 1.0;
  return -order * std::atan(2.0 * z * zr / (zr * zr - (z * z + 0.25 * d * d)));
}

double curvature_difference_closed_form(double k, double rho, double z, double d, double zr) {
  return k * rho * rho * d / (2.0 * (z * z + zr * zr));
}

void GridSpec::validate() const {
  if (n_a == 0 || n_b == 0) throw DomainError("grid sample counts must be positive");
  if (!std::isfinite(a_min) || !std::isfinite(a_max) || !std::isfinite(b_min) ||
      !std::isfinite(b_max) || !std::isfinite(fixed) || !std::isfinite(t))
    throw DomainError("grid bounds must be finite");
  if (n_a > 1 ? !(a_max > a_min) : a_max < a_min)
    throw DomainError("grid axis 1 must have a positive extent");
  if (n_b > 1 ? !(b_max > b_min) : b_max < b_min)
    throw DomainError("grid axis 2 must have a positive extent");
  if (plane == Plane::rho_z && a_min < 0.0) throw DomainError("rho range must be non-negative");
}

double GridSpec::da() const { return n_a > 1 ? (a_max - a_min) / static_cast<double>(n_a - 1) : 0.0; }
double GridSpec::db() const { return n_b > 1 ? (b_max - b_min) / static_cast<double>(n_b - 1) : 0.0; }
double GridSpec::a(std::size_t i) const { return n_a > 1 ? a_min + static_cast<double>(i) * da() : a_min; }
double GridSpec::b(std::size_t j) const { return n_b > 1 ? b_min + static_cast<double>(j) * db() : b_min; }

CylPoint GridSpec::point(std::size_t i, std::size_t j) const {
  if (plane == Plane::rho_z) return {a(i), fixed, b(j)};
  const double x = a(i);
  const double y = b(j);
  return {std::hypot(x, y), std::atan2(y, x), fixed};
}

FieldMap intensity_map(const PairSpec& pair, const GridSpec& grid, PhaseModel model) {
  pair.validate();
  grid.validate();
  FieldMap map;
  map.grid = grid;
  map.amplitude.resize(grid.size());
  map.phase.resize(grid.size());
  map.intensity.resize(grid.size());
  parallel_for(grid.n_b, [&](std::size_t j) {
    for (std::size_t i = 0; i < grid.n_a; ++i) {
      const CylPoint pt = grid.point(i, j);
      const std::size_t idx = map.index(i, j);
      const double u = total_amplitude(pair, pt, grid.t, model);
      map.amplitude[idx] = u;
      map.intensity[idx] = u * u;
      map.phase[idx] = total_phase(pair, pt, grid.t, model).value_or(
          std::numeric_limits<double>::quiet_NaN());
    }
  });
  return map;
}

void write_field_map_csv(const FieldMap& map, std::ostream& out) {
  if (map.grid.plane == Plane::rho_z)
    write_csv_header(out, {"rho", "z", "amplitude", "phase", "intensity"});
  else
    write_csv_header(out, {"x", "y", "amplitude", "phase", "intensity"});
  for (std::size_t j = 0; j < map.grid.n_b; ++j) {
    for (std::size_t i = 0; i < map.grid.n_a; ++i) {
      const std::size_t idx = map.index(i, j);
      write_csv_row(out, {map.grid.a(i), map.grid.b(j), map.amplitude[idx], map.phase[idx],
                          map.intensity[idx]});
    }
  }
}

}  // namespace vl
