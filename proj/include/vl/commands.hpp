#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "vl/config.hpp"

namespace vl {

/// Each command writes its files under cfg.out_dir (created if missing), plus
/// metadata.json, and returns the summary it wrote. Errors propagate as the
/// vl::Error hierarchy; I/O failures become IoError.

/// field_map.csv for cfg.grid and slice_<i>.csv for every x-y slice.
nlohmann::json cmd_field_map(const RunConfig& cfg);

/// spring_sweep.csv: d, K0_analytic, K0_numeric (steps points from d_min to d_max).
nlohmann::json cmd_spring_sweep(const RunConfig& cfg);

/// rings.json and rings_comparison.csv (measured radii against the w1, w2, delta-rho formulas).
nlohmann::json cmd_rings(const RunConfig& cfg);

/// ferris_<i>.csv maps at each sampled time and ferris_summary.json with the
/// measured rotation rate and axial drift against delta_omega/(2l) and delta_omega/(2k).
nlohmann::json cmd_ferris(const RunConfig& cfg);

/// trajectory.csv and trajectory_summary.json.
nlohmann::json cmd_trajectory(const RunConfig& cfg);

/// d values of a sweep, inclusive of both ends.
std::vector<double> sweep_points(const SweepConfig& sweep);

}  // namespace vl
