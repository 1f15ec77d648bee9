#pragma once

#include <numbers>

namespace vl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kSodiumMass = 3.8175e-26;       // kg

/// Below this radius the azimuthal unit vector is treated as undefined.
inline constexpr double kAxisEpsilon = 1e-15;  // m

}  // namespace vl
