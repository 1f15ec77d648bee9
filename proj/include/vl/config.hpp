#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vl/atom_forces.hpp"
#include "vl/dynamics.hpp"
#include "vl/ring_analysis.hpp"

namespace vl {

enum class Dimension { length, angular_frequency, time, mass, wavenumber, dimensionless };

/// Reference scales for relative units ("2w0", "0.5zR", "1.5gamma", ...).
struct UnitContext {
  double lambda{0.0};
  double w0{0.0};
  double zr{0.0};
  double k{0.0};
  double gamma{0.0};
  double rho0{0.0};
};

/// Converts a bare SI number or a unit-suffixed string to SI.
///   length: m cm mm um nm lambda w0 zR rho0
///   angular frequency: rad/s Hz kHz MHz GHz (times 2 pi) gamma
///   time: s ms us ns      mass: kg amu      wavenumber: 1/m k
/// Throws ConfigError for unknown suffixes or malformed numbers.
double parse_quantity(const nlohmann::json& value, Dimension dim, const UnitContext& ctx,
                      const std::string& key);

struct SweepConfig {
  double d_min{0.0};
  double d_max{0.0};
  std::size_t steps{50};
};

struct FerrisConfig {
  std::vector<double> times;  // s
  std::size_t n_phi{720};
  double track_span{0.0};     // axial half-width (m) searched when tracking the central fringe
};

struct TrajectoryConfig {
  CylPoint start{};
  Velocity velocity{};
  IntegratorConfig integrator{};
};

struct RunConfig {
  PairSpec pair{};
  AtomSpec atom{};
  PhaseModel phase_model{PhaseModel::full};  // for field maps
  ForceOptions force{};
  std::optional<GridSpec> grid;
  std::vector<double> slice_z;  // x-y slices for field-map
  GridSpec slice_grid{};        // x-y extent template for the slices
  SweepConfig sweep{};
  FerrisConfig ferris{};
  TrajectoryConfig trajectory{};
  RingDetectionOptions rings{};
  std::filesystem::path out_dir{"out"};
  nlohmann::json source;  // the document as loaded
};

RunConfig parse_config(const nlohmann::json& doc);
/// Throws IoError if the file cannot be read, ConfigError if it is invalid.
RunConfig load_config(const std::filesystem::path& path);

/// Applies --mode to both field maps and forces.
void apply_phase_model(RunConfig& cfg, PhaseModel model);
PhaseModel parse_phase_model(const std::string& name);

/// SI echo of every resolved value.
nlohmann::json config_metadata(const RunConfig& cfg);

/// VL_THREADS if set and valid, otherwise `requested` (0 = hardware concurrency).
unsigned resolve_thread_count(unsigned requested);

}  // namespace vl
