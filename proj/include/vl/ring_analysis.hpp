#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "vl/superpose.hpp"

namespace vl {

enum class RingClass { central, double_member, single };

struct Ring {
  double z_pos{0.0};           // m
  double radius{0.0};          // m
  double peak_intensity{0.0};  // field units squared
  RingClass classification{RingClass::single};
};

struct Splitting {
  double z_pair{0.0};     // mean axial position of the two members
  double delta_rho{0.0};  // |radius_outer_z - radius_inner_z|
  std::size_t first{0};   // indices into RingSet::rings
  std::size_t second{0};
};

struct RingSet {
  std::vector<Ring> rings;  // strictly increasing z_pos
  double fringe_delta{0.0};
  std::vector<Splitting> splittings;
};

struct RingDetectionOptions {
  /// Minimum (Imax - Imin)/(Imax + Imin) against the nearest minimum on each side.
  double min_contrast{0.05};
  /// Skip the resolution check (for coarse previews only).
  bool enforce_resolution{true};
};

/// Evaluates the intensity on `region` (a rho-z half-plane) and detects rings.
/// Throws ResolutionError if the grid is too coarse or does not span |z| <= d/2,
/// NoRingsError if no standing-wave maxima are found.
RingSet find_rings(const PairSpec& pair, const GridSpec& region,
                   const RingDetectionOptions& opts = {});
/// Detection on an existing map.
RingSet find_rings(const FieldMap& map, const PairSpec& pair,
                   const RingDetectionOptions& opts = {});

/// Throws ResolutionError describing the refinement needed.
void check_ring_resolution(const PairSpec& pair, const GridSpec& region);

/// Per-z ridge of the radial intensity maximum, refined by a parabola through
/// the bracketing samples.
struct Ridge {
  std::vector<double> z;
  std::vector<double> radius;
  std::vector<double> intensity;
};
Ridge radial_ridge(const FieldMap& map);

struct DoubleRingRadii {
  double w1{0.0};
  double w2{0.0};
};

/// w1,2 = w0 sqrt(|l|/2) sqrt(1 + (d/2 -+ delta)^2 / zR^2). Requires 0 <= delta < d/2.
DoubleRingRadii double_ring_radii(const PairSpec& pair, double delta);

struct RadialSeparation {
  double exact{0.0};             // w2 - w1
  double approx{0.0};            // leading Taylor term w0 sqrt(|l|/2) d delta / zR^2
  double approx_w0_alpha{0.0}; // w0 sqrt(2|l|) d delta / zR^2 (twice the Taylor term)
  double alpha{0.0};             // sqrt(2|l|) d delta / zR^2
};

/// Requires 0 <= delta < d/2; delta = 0 gives zero separations.
RadialSeparation radial_separation(const PairSpec& pair, double delta);

/// Angle by which pattern `b` is rotated relative to `a`, both sampled at
/// n equally spaced azimuths on [0, 2 pi). Uses the phase of the cross-spectrum
/// at `harmonic`, so the result is unique modulo 2 pi / harmonic and is
/// returned in (-pi/harmonic, pi/harmonic].
double azimuthal_shift(const std::vector<double>& a, const std::vector<double>& b, int harmonic);

/// Sub-sample position of the largest sample of `values` on a uniform axis,
/// refined by a parabola through the neighbours.
double refined_peak_position(const std::vector<double>& axis, const std::vector<double>& values);

/// Rotation rate of the interference pattern measured from intensity samples on
/// the central ring (rho0, z = 0) at times 0 and t. Requires |delta_omega t| < pi
/// so the shift is unambiguous.
double measure_rotation_rate(const PairSpec& pair, double t, std::size_t n_phi,
                             PhaseModel model = PhaseModel::full);

/// Axial speed of the fringe nearest z = 0 along (rho0, phi = 0), located to
/// sub-nanometre precision at times 0 and t by a golden-section search.
double measure_axial_drift(const PairSpec& pair, double t, PhaseModel model = PhaseModel::full);

std::string ring_class_name(RingClass c);

/// {"fringe_delta", "rings": [{"z", "radius", "peak", "class"}], "splittings": [{"z", "delta_rho"}]}
nlohmann::json ring_set_to_json(const RingSet& set);

}  // namespace vl
