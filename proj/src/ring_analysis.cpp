#include "vl/ring_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "vl/atom_forces.hpp"
#include "vl/constants.hpp"
#include "vl/errors.hpp"
#include "vl/parallel.hpp"

namespace vl {

namespace {

// Vertex offset (in samples) of the parabola through (-1, ym), (0, y0), (1, yp).
double parabola_offset(double ym, double y0, double yp) {
  const double curv = ym - 2.0 * y0 + yp;
  if (curv == 0.0) return 0.0;
  return std::clamp(0.5 * (ym - yp) / curv, -0.5, 0.5);
}

double parabola_value(double ym, double y0, double yp, double off) {
  return y0 + 0.5 * off * (yp - ym) + 0.5 * off * off * (yp - 2.0 * y0 + ym);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void check_ring_resolution(const PairSpec& pair, const GridSpec& region) {
  if (region.plane != Plane::rho_z) throw ResolutionError("ring detection needs a rho-z half-plane");
  const double lambda = pair.beam1.wavelength;
  const double w0 = std::min(pair.beam1.waist_w0, pair.beam2.waist_w0);
  const double dz = region.db();
  const double drho = region.da();
  std::ostringstream msg;
  if (region.n_b < 3 || region.n_a < 3 || dz > lambda / 20.0 || drho > w0 / 100.0) {
    const double need_z = std::ceil((region.b_max - region.b_min) / (lambda / 20.0)) + 1.0;
    const double need_rho = std::ceil((region.a_max - region.a_min) / (w0 / 100.0)) + 1.0;
    msg << "grid too coarse for ring detection: need axial spacing <= lambda/20 and radial "
        << "spacing <= w0/100; use n_z >= " << need_z << " and n_rho >= " << need_rho;
    throw ResolutionError(msg.str());
  }
  const double half_d = 0.5 * pair.separation_d;
  if (region.b_min > -half_d + dz || region.b_max < half_d - dz) {
    msg << "ring detection region must span z in [-d/2, d/2] = [" << -half_d << ", " << half_d
        << "] m";
    throw ResolutionError(msg.str());
  }
}

Ridge radial_ridge(const FieldMap& map) {
  const GridSpec& g = map.grid;
  Ridge ridge;
  ridge.z.resize(g.n_b);
  ridge.radius.resize(g.n_b);
  ridge.intensity.resize(g.n_b);
  parallel_for(g.n_b, [&](std::size_t j) {
    const double* row = map.intensity.data() + j * g.n_a;
    const std::size_t i = static_cast<std::size_t>(std::max_element(row, row + g.n_a) - row);
    double radius = g.a(i);
    double peak = row[i];
    if (i > 0 && i + 1 < g.n_a) {
      const double off = parabola_offset(row[i - 1], row[i], row[i + 1]);
      radius += off * g.da();
      peak = parabola_value(row[i - 1], row[i], row[i + 1], off);
    }
    ridge.z[j] = g.b(j);
    ridge.radius[j] = radius;
    ridge.intensity[j] = peak;
  });
  return ridge;
}

RingSet find_rings(const PairSpec& pair, const GridSpec& region, const RingDetectionOptions& opts) {
  pair.validate();
  region.validate();
  if (opts.enforce_resolution) check_ring_resolution(pair, region);
  return find_rings(intensity_map(pair, region), pair, opts);
}

RingSet find_rings(const FieldMap& map, const PairSpec& pair, const RingDetectionOptions& opts) {
  if (map.grid.plane != Plane::rho_z) throw ResolutionError("ring detection needs a rho-z half-plane");
  const Ridge ridge = radial_ridge(map);
  const std::vector<double>& I = ridge.intensity;
  const std::size_t n = I.size();
  const double dz = map.grid.db();
  // A fringe maximum must fall to a minimum within one wavelength on each side.
  const std::size_t reach =
      dz > 0.0 ? static_cast<std::size_t>(std::ceil(pair.beam1.wavelength / dz)) : 0;

  RingSet set;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (!(I[j] > I[j - 1] && I[j] >= I[j + 1])) continue;
    std::size_t lo = j;
    while (lo > 0 && I[lo - 1] <= I[lo] && j - lo <= reach) --lo;
    std::size_t hi = j;
    while (hi + 1 < n && I[hi + 1] <= I[hi] && hi - j <= reach) ++hi;
    if (j - lo > reach || hi - j > reach) continue;
    const double cl = (I[j] - I[lo]) / (I[j] + I[lo]);
    const double cr = (I[j] - I[hi]) / (I[j] + I[hi]);
    if (!(cl >= opts.min_contrast && cr >= opts.min_contrast)) continue;

    const double off = parabola_offset(I[j - 1], I[j], I[j + 1]);
    Ring r;
    r.z_pos = ridge.z[j] + off * dz;
    r.radius = parabola_value(ridge.radius[j - 1], ridge.radius[j], ridge.radius[j + 1], off);
    r.peak_intensity = parabola_value(I[j - 1], I[j], I[j + 1], off);
    if (r.radius > 0.0 && r.peak_intensity > 0.0) set.rings.push_back(r);
  }
  if (set.rings.empty()) throw NoRingsError("no standing-wave intensity maxima found");

  // Fringe spacing: median gap between adjacent maxima inside |z| <= d/4.
  const double window = 0.25 * pair.separation_d;
  std::vector<double> gaps;
  for (std::size_t k = 1; k < set.rings.size(); ++k) {
    const Ring& a = set.rings[k - 1];
    const Ring& b = set.rings[k];
    if (std::abs(a.z_pos) <= window && std::abs(b.z_pos) <= window) gaps.push_back(b.z_pos - a.z_pos);
  }
  if (gaps.empty())
    for (std::size_t k = 1; k < set.rings.size(); ++k)
      gaps.push_back(set.rings[k].z_pos - set.rings[k - 1].z_pos);
  set.fringe_delta = gaps.empty() ? 0.0 : median(gaps);

  // Central ring: the maximum closest to z = 0, if within half a fringe.
  std::size_t centre = 0;
  for (std::size_t k = 1; k < set.rings.size(); ++k)
    if (std::abs(set.rings[k].z_pos) < std::abs(set.rings[centre].z_pos)) centre = k;
  const bool has_centre =
      set.fringe_delta == 0.0 || std::abs(set.rings[centre].z_pos) <= 0.5 * set.fringe_delta;
  if (has_centre) set.rings[centre].classification = RingClass::central;

  // Pair adjacent off-centre maxima outward from the centre on each side.
  const double max_gap = 1.5 * set.fringe_delta;
  auto pair_side = [&](std::vector<std::size_t> order) {
    for (std::size_t k = 0; k + 1 < order.size();) {
      Ring& a = set.rings[order[k]];
      Ring& b = set.rings[order[k + 1]];
      if (std::abs(b.z_pos - a.z_pos) <= max_gap) {
        a.classification = RingClass::double_member;
        b.classification = RingClass::double_member;
        set.splittings.push_back({0.5 * (a.z_pos + b.z_pos), std::abs(b.radius - a.radius),
                                  std::min(order[k], order[k + 1]),
                                  std::max(order[k], order[k + 1])});
        k += 2;
      } else {
        ++k;
      }
    }
  };
  std::vector<std::size_t> upper, lower;
  const double split_z = has_centre ? set.rings[centre].z_pos : 0.0;
  for (std::size_t k = 0; k < set.rings.size(); ++k) {
    if (has_centre && k == centre) continue;
    (set.rings[k].z_pos > split_z ? upper : lower).push_back(k);
  }
  std::reverse(lower.begin(), lower.end());
  // Coincident foci give both beams the same radius at every z: no double rings.
  if (pair.separation_d > 0.0) {
    pair_side(upper);
    pair_side(lower);
  }
  std::sort(set.splittings.begin(), set.splittings.end(),
            [](const Splitting& a, const Splitting& b) { return a.z_pair < b.z_pair; });
  return set;
}

DoubleRingRadii double_ring_radii(const PairSpec& pair, double delta) {
  require_symmetric_doughnuts(pair);
  const double half_d = 0.5 * pair.separation_d;
  if (!(delta >= 0.0) || !(delta < half_d))
    throw DomainError("double-ring offset delta must satisfy 0 <= delta < d/2");
  const BeamSpec& b = pair.beam1;
  const double zr = rayleigh_range(b);
  const double base = b.waist_w0 * std::sqrt(0.5 * std::abs(b.winding_l));
  const double near = (half_d - delta) / zr;
  const double far = (half_d + delta) / zr;
  return {base * std::sqrt(1.0 + near * near), base * std::sqrt(1.0 + far * far)};
}

RadialSeparation radial_separation(const PairSpec& pair, double delta) {
  const DoubleRingRadii r = double_ring_radii(pair, delta);
  const BeamSpec& b = pair.beam1;
  const double zr = rayleigh_range(b);
  const double al = std::abs(b.winding_l);
  const double ratio = pair.separation_d * delta / (zr * zr);
  RadialSeparation s;
  s.exact = r.w2 - r.w1;
  s.alpha = std::sqrt(2.0 * al) * ratio;
  s.approx_w0_alpha = b.waist_w0 * s.alpha;
  s.approx = b.waist_w0 * std::sqrt(0.5 * al) * ratio;
  return s;
}

double azimuthal_shift(const std::vector<double>& a, const std::vector<double>& b, int harmonic) {
  if (a.size() != b.size() || a.empty()) throw DomainError("azimuthal samples must match in size");
  if (harmonic == 0) throw DomainError("harmonic must be non-zero");
  const std::size_t n = a.size();
  std::complex<double> ca{}, cb{};
  double mass_a = 0.0, mass_b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mass_a += std::abs(a[k]);
    mass_b += std::abs(b[k]);
    const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> basis = std::polar(1.0, -harmonic * phi);
    ca += a[k] * basis;
    cb += b[k] * basis;
  }
  if (!(std::abs(ca) > 1e-12 * mass_a) || !(std::abs(cb) > 1e-12 * mass_b))
    throw NumericalError("pattern has no content at the requested harmonic");
  return std::arg(ca * std::conj(cb)) / harmonic;
}

double refined_peak_position(const std::vector<double>& axis, const std::vector<double>& values) {
  if (axis.size() != values.size() || axis.size() < 3)
    throw DomainError("peak refinement needs at least three matching samples");
  const std::size_t i =
      static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  if (i == 0 || i + 1 == values.size()) return axis[i];
  const double off = parabola_offset(values[i - 1], values[i], values[i + 1]);
  return axis[i] + off * (axis[i + 1] - axis[i]);
}

double measure_rotation_rate(const PairSpec& pair, double t, std::size_t n_phi, PhaseModel model) {
  const double expected = ferris_rate(pair);  // validates that the pattern winds
  if (!(t > 0.0) || !(std::abs(pair.delta_omega * t) < kPi))
    throw DomainError("rotation probe time must satisfy 0 < |delta_omega t| < pi");
  if (n_phi < 8) throw DomainError("need at least 8 azimuthal samples");
  const int harmonic = static_cast<int>(std::lround(std::abs(pair.delta_omega / expected)));
  const double rho0 = central_ring_radius(pair);
  std::vector<double> a(n_phi), b(n_phi);
  parallel_for(n_phi, [&](std::size_t i) {
    const double phi = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_phi);
    const double ua = total_amplitude(pair, {rho0, phi, 0.0}, 0.0, model);
    const double ub = total_amplitude(pair, {rho0, phi, 0.0}, t, model);
    a[i] = ua * ua;
    b[i] = ub * ub;
  });
  return azimuthal_shift(a, b, harmonic) / t;
}

namespace {

// Golden-section maximum of f on [lo, hi].
template <class F>
double golden_max(F f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (std::abs(lo) + std::abs(hi)) + 1e-18; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Intensity maximum along z closest to `centre`, searched within +-span.
template <class F>
double nearest_axial_peak(F intensity, double centre, double span) {
  constexpr int n = 400;
  const double h = 2.0 * span / n;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = intensity(centre - span + i * h);
  int best = -1;
  for (int i = 1; i < n; ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1] &&
        (best < 0 || std::abs(i - n / 2) < std::abs(best - n / 2)))
      best = i;
  }
  if (best < 0) throw NumericalError("no axial fringe found near the probe point");
  const double z = centre - span + best * h;
  return golden_max(intensity, z - h, z + h);
}

}  // namespace

double measure_axial_drift(const PairSpec& pair, double t, PhaseModel model) {
  pair.validate();
  if (pair.delta_omega == 0.0) throw DomainError("axial drift needs delta_omega != 0");
  if (!(t > 0.0) || !(std::abs(pair.delta_omega * t) < 0.5 * kPi))
    throw DomainError("drift probe time must satisfy 0 < |delta_omega t| < pi/2");
  const double rho0 = central_ring_radius(pair);
  const double lambda = pair.beam1.wavelength;
  auto at = [&](double time) {
    return [&pair, rho0, time, model](double z) {
      const double u = total_amplitude(pair, {rho0, 0.0, z}, time, model);
      return u * u;
    };
  };
  const double z0 = nearest_axial_peak(at(0.0), 0.0, 0.5 * lambda);
  const double z1 = nearest_axial_peak(at(t), z0, 0.25 * lambda);
  return (z1 - z0) / t;
}

std::string ring_class_name(RingClass c) {
  switch (c) {
    case RingClass::central: return "central";
    case RingClass::double_member: return "double";
    case RingClass::single: return "single";
  }
  return "single";
}

nlohmann::json ring_set_to_json(const RingSet& set) {
  nlohmann::json doc;
  doc["fringe_delta"] = set.fringe_delta;
  doc["rings"] = nlohmann::json::array();
  for (const Ring& r : set.rings)
    doc["rings"].push_back({{"z", r.z_pos},
                            {"radius", r.radius},
                            {"peak", r.peak_intensity},
                            {"class", ring_class_name(r.classification)}});
  doc["splittings"] = nlohmann::json::array();
  for (const Splitting& s : set.splittings)
    doc["splittings"].push_back({{"z", s.z_pair}, {"delta_rho", s.delta_rho}});
  return doc;
}

}  // namespace vl
