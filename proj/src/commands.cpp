#include "vl/commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vl/constants.hpp"
#include "vl/csv.hpp"
#include "vl/errors.hpp"

namespace vl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path prepare_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());
  return cfg.out_dir;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

void write_metadata(const fs::path& dir, const RunConfig& cfg, const char* command,
                    const json& summary) {
  json meta = config_metadata(cfg);
  meta["command"] = command;
  meta["summary"] = summary;
  write_json(dir / "metadata.json", meta);
}

PairSpec with_separation(const PairSpec& pair, double d) {
  PairSpec p = make_pair(pair.beam1, pair.beam2, d, pair.delta_omega, pair.delta_k);
  p.reference_amplitude = pair.reference_amplitude;
  return p;
}

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<double> sweep_points(const SweepConfig& sweep) {
  if (!(sweep.d_min >= 0.0)) throw DomainError("sweep d_min must be non-negative");
  if (!(sweep.d_max >= sweep.d_min)) throw DomainError("sweep d_max must be at least d_min");
  if (sweep.d_max == sweep.d_min) return {sweep.d_min};
  if (sweep.steps < 2) throw DomainError("a sweep over a range needs at least 2 steps");
  std::vector<double> d(sweep.steps);
  for (std::size_t i = 0; i < sweep.steps; ++i)
    d[i] = sweep.d_min + (sweep.d_max - sweep.d_min) * static_cast<double>(i) /
                             static_cast<double>(sweep.steps - 1);
  return d;
}

json cmd_field_map(const RunConfig& cfg) {
  if (!cfg.grid && cfg.slice_z.empty())
    throw ConfigError("field-map needs a 'grid' or 'slices' section");
  const fs::path dir = prepare_dir(cfg);
  json summary;
  summary["files"] = json::array();
  if (cfg.grid) {
    const FieldMap map = intensity_map(cfg.pair, *cfg.grid, cfg.phase_model);
    write_file(dir / "field_map.csv", [&](std::ostream& out) { write_field_map_csv(map, out); });
    summary["files"].push_back("field_map.csv");
  }
  for (std::size_t i = 0; i < cfg.slice_z.size(); ++i) {
    GridSpec g = cfg.slice_grid;
    g.fixed = cfg.slice_z[i];
    const FieldMap map = intensity_map(cfg.pair, g, cfg.phase_model);
    const std::string name = "slice_" + std::to_string(i) + ".csv";
    write_file(dir / name, [&](std::ostream& out) { write_field_map_csv(map, out); });
    summary["files"].push_back(name);
  }
  summary["slice_z"] = cfg.slice_z;
  write_metadata(dir, cfg, "field-map", summary);
  return summary;
}

json cmd_spring_sweep(const RunConfig& cfg) {
  require_symmetric_doughnuts(cfg.pair);
  const std::vector<double> ds = sweep_points(cfg.sweep);
  std::vector<double> analytic(ds.size()), numeric(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const PairSpec p = with_separation(cfg.pair, ds[i]);
    analytic[i] = spring_constant_k0(cfg.atom, p);
    numeric[i] = spring_constant_numeric(cfg.atom, p);
  }
  const fs::path dir = prepare_dir(cfg);
  write_file(dir / "spring_sweep.csv", [&](std::ostream& out) {
    write_csv_header(out, {"d", "K0_analytic", "K0_numeric"});
    for (std::size_t i = 0; i < ds.size(); ++i) write_csv_row(out, {ds[i], analytic[i], numeric[i]});
  });
  std::size_t imax = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (analytic[i] > analytic[imax]) imax = i;
    const double scale = std::max(std::abs(analytic[i]), std::abs(numeric[i]));
    if (scale > 0.0) worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  json summary = {{"points", ds.size()},
                  {"d_at_max", ds[imax]},
                  {"K0_max", analytic[imax]},
                  {"max_relative_disagreement", worst},
                  {"files", {"spring_sweep.csv"}}};
  write_metadata(dir, cfg, "spring-sweep", summary);
  return summary;
}

json cmd_rings(const RunConfig& cfg) {
  if (!cfg.grid) throw ConfigError("rings needs a 'grid' section (rho_z plane)");
  const RingSet set = find_rings(cfg.pair, *cfg.grid, cfg.rings);
  const double half_d = 0.5 * cfg.pair.separation_d;
  const fs::path dir = prepare_dir(cfg);
  write_json(dir / "rings.json", ring_set_to_json(set));

  // One row per detected double ring. delta_pair = d/2 - |z_pair| is that ring's
  // own offset from the nearer focal plane; the formulas are evaluated there.
  write_file(dir / "rings_comparison.csv", [&](std::ostream& out) {
    write_csv_header(out, {"z_pair", "radius_inner", "radius_outer", "delta_rho_measured",
                           "delta_pair", "w1", "w2", "delta_rho_exact", "delta_rho_approx",
                           "delta_rho_w0_alpha", "alpha", "alpha_below_1"});
    for (const Splitting& s : set.splittings) {
      const double ra = set.rings[s.first].radius;
      const double rb = set.rings[s.second].radius;
      const double delta = half_d - std::abs(s.z_pair);
      double w1 = NAN, w2 = NAN, ex = NAN, ap = NAN, pr = NAN, al = NAN;
      if (delta >= 0.0 && delta < half_d) {
        const DoubleRingRadii w = double_ring_radii(cfg.pair, delta);
        const RadialSeparation r = radial_separation(cfg.pair, delta);
        w1 = w.w1;
        w2 = w.w2;
        ex = r.exact;
        ap = r.approx;
        pr = r.approx_w0_alpha;
        al = r.alpha;
      }
      write_csv_row(out, {s.z_pair, std::min(ra, rb), std::max(ra, rb), s.delta_rho, delta, w1, w2,
                          ex, ap, pr, al, al < 1.0 ? 1.0 : 0.0});
    }
  });

  json summary;
  summary["ring_count"] = set.rings.size();
  summary["double_count"] = set.splittings.size();
  summary["fringe_delta"] = set.fringe_delta;
  summary["fringe_delta_over_half_lambda"] = set.fringe_delta / (0.5 * cfg.pair.beam1.wavelength);
  try {
    summary["rho0"] = central_ring_radius(cfg.pair);
  } catch (const ConfigError&) {
    summary["rho0"] = nullptr;
  }
  for (const Ring& r : set.rings)
    if (r.classification == RingClass::central) summary["central"] = {{"z", r.z_pos}, {"radius", r.radius}};

  // Open question: is delta in "a double ring at z = d/2 - delta" counted from the
  // focal plane or from the centre? Report the pair nearest each reading.
  const double delta = set.fringe_delta;
  if (!set.splittings.empty() && delta > 0.0 && delta < half_d) {
    const DoubleRingRadii w = double_ring_radii(cfg.pair, delta);
    const RadialSeparation r = radial_separation(cfg.pair, delta);
    auto nearest = [&](double z) {
      const Splitting* best = &set.splittings.front();
      for (const Splitting& s : set.splittings)
        if (std::abs(s.z_pair - z) < std::abs(best->z_pair - z)) best = &s;
      return best;
    };
    json conv = json::object();
    for (const auto& [name, z] : {std::pair<const char*, double>{"from_focal_plane", half_d - delta},
                                  std::pair<const char*, double>{"from_centre", delta}}) {
      const Splitting* s = nearest(z);
      const double ra = set.rings[s->first].radius;
      const double rb = set.rings[s->second].radius;
      const double inner = std::min(ra, rb), outer = std::max(ra, rb);
      conv[name] = {{"target_z", z},
                    {"z_pair", s->z_pair},
                    {"radius_inner", inner},
                    {"radius_outer", outer},
                    {"w1_error", std::abs(inner - w.w1) / w.w1},
                    {"w2_error", std::abs(outer - w.w2) / w.w2}};
    }
    summary["delta_conventions"] = conv;
    summary["formulas_at_fringe_delta"] = {{"w1", w.w1},
                                           {"w2", w.w2},
                                           {"delta_rho_exact", r.exact},
                                           {"delta_rho_approx", r.approx},
                                           {"delta_rho_w0_alpha", r.approx_w0_alpha},
                                           {"alpha", r.alpha},
                                           {"alpha_below_1", r.alpha < 1.0}};
  }
  summary["files"] = {"rings.json", "rings_comparison.csv"};
  write_metadata(dir, cfg, "rings", summary);
  return summary;
}

json cmd_ferris(const RunConfig& cfg) {
  const PairSpec& pair = cfg.pair;
  if (pair.delta_omega == 0.0) throw DomainError("ferris needs a non-zero delta_omega");
  const double rate_expected = ferris_rate(pair);
  const double lift_expected = lift_speed(pair);
  // Probe times well inside the unambiguous window of each measurement.
  const double t_rot = 0.25 * kPi / std::abs(pair.delta_omega);
  const double t_lift = 0.125 * kPi / std::abs(pair.delta_omega);
  const double rate = measure_rotation_rate(pair, t_rot, cfg.ferris.n_phi, cfg.phase_model);
  const double drift = measure_axial_drift(pair, t_lift, cfg.phase_model);

  const fs::path dir = prepare_dir(cfg);
  json files = json::array();
  for (std::size_t i = 0; i < cfg.ferris.times.size(); ++i) {
    auto write_at = [&](GridSpec g, const std::string& name) {
      g.t = cfg.ferris.times[i];
      const FieldMap map = intensity_map(pair, g, cfg.phase_model);
      write_file(dir / name, [&](std::ostream& out) { write_field_map_csv(map, out); });
      files.push_back(name);
    };
    if (cfg.grid) write_at(*cfg.grid, "ferris_" + std::to_string(i) + ".csv");
    for (std::size_t s = 0; s < cfg.slice_z.size(); ++s) {
      GridSpec g = cfg.slice_grid;
      g.fixed = cfg.slice_z[s];
      write_at(g, "ferris_" + std::to_string(i) + "_slice_" + std::to_string(s) + ".csv");
    }
  }
  json summary = {{"rotation_rate_measured", rate},
                  {"rotation_rate_expected", rate_expected},
                  {"rotation_relative_error", std::abs(rate - rate_expected) / std::abs(rate_expected)},
                  {"drift_speed_measured", drift},
                  {"drift_speed_expected", lift_expected},
                  {"drift_relative_error", std::abs(drift - lift_expected) / std::abs(lift_expected)},
                  {"times", cfg.ferris.times},
                  {"files", files}};
  write_json(dir / "ferris_summary.json", summary);
  summary["files"].push_back("ferris_summary.json");
  write_metadata(dir, cfg, "ferris", summary);
  return summary;
}

json cmd_trajectory(const RunConfig& cfg) {
  const TrajectoryConfig& tc = cfg.trajectory;
  const TrajectoryState init = TrajectoryState::from_cylindrical(tc.start, tc.velocity, 0.0);
  const std::vector<TrajectoryState> traj = integrate(cfg.atom, cfg.pair, init, tc.integrator);
  const fs::path dir = prepare_dir(cfg);
  write_file(dir / "trajectory.csv", [&](std::ostream& out) { write_trajectory_csv(traj, out); });

  std::vector<double> t, z;
  bool lz_nondecreasing = true;
  double lz_prev = angular_momentum_z(cfg.atom, traj.front());
  for (const TrajectoryState& s : traj) {
    t.push_back(s.time);
    z.push_back(s.r[2]);
    const double lz = angular_momentum_z(cfg.atom, s);
    if (lz < lz_prev - 1e-12 * std::abs(lz_prev)) lz_nondecreasing = false;
    lz_prev = lz;
  }
  double measured = NAN;
  try {
    measured = oscillation_frequency(t, z);
  } catch (const NumericalError&) {
  }
  double expected = NAN;
  try {
    expected = trap_frequency(cfg.atom, cfg.pair);
  } catch (const ConfigError&) {
  }
  json summary = {{"samples", traj.size()},
                  {"axial_frequency_measured", optional_number(measured)},
                  {"axial_frequency_expected", optional_number(expected)},
                  {"lz_initial", angular_momentum_z(cfg.atom, traj.front())},
                  {"lz_final", angular_momentum_z(cfg.atom, traj.back())},
                  {"lz_nondecreasing", lz_nondecreasing},
                  {"energy_initial", total_energy(cfg.atom, cfg.pair, tc.integrator, traj.front())},
                  {"energy_final", total_energy(cfg.atom, cfg.pair, tc.integrator, traj.back())},
                  {"files", {"trajectory.csv", "trajectory_summary.json"}}};
  write_json(dir / "trajectory_summary.json", summary);
  write_metadata(dir, cfg, "trajectory", summary);
  return summary;
}

}  // namespace vl
