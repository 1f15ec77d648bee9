// vlsim: command-line front end for the vortex-lattice simulator.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "vl/commands.hpp"
#include "vl/errors.hpp"
#include "vl/parallel.hpp"

namespace {

int exit_code(vl::ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laguerre-Gaussian vortex lattice simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::string mode;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", threads, "worker threads (0 = all cores; VL_THREADS overrides)");
  app.add_option("--mode", mode, "phase model for fields and forces")
      ->check(CLI::IsMember({"reduced", "full"}));

  auto* field_map = app.add_subcommand("field-map", "intensity/phase maps (rho-z plane, x-y slices)");
  auto* sweep = app.add_subcommand("spring-sweep", "axial spring constant K0 against d");
  std::string d_min, d_max;
  int steps = 0;
  sweep->add_option("--d-min", d_min, "smallest separation (unit string or metres)");
  sweep->add_option("--d-max", d_max, "largest separation");
  sweep->add_option("--steps", steps, "number of separations");
  auto* rings = app.add_subcommand("rings", "detect the ring lattice and compare with the double-ring formulas");
  auto* ferris = app.add_subcommand("ferris", "pattern rotation and axial drift under a frequency offset");
  std::vector<std::string> t_samples;
  ferris->add_option("--t-samples", t_samples, "times at which to write maps (unit strings)");
  auto* trajectory = app.add_subcommand("trajectory", "integrate a point-atom trajectory");
  for (auto* sub : {field_map, sweep, rings, ferris, trajectory}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; malformed command lines are configuration errors.
    return app.exit(e) == 0 ? exit_code(vl::ExitCode::ok) : exit_code(vl::ExitCode::config);
  }

  try {
    vl::RunConfig cfg = vl::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!mode.empty()) {
      vl::apply_phase_model(cfg, vl::parse_phase_model(mode));
      cfg.trajectory.integrator.force.phase_model = cfg.force.phase_model;
    }
    vl::set_thread_count(vl::resolve_thread_count(threads));

    nlohmann::json summary;
    if (*field_map) {
      summary = vl::cmd_field_map(cfg);
    } else if (*sweep) {
      const vl::UnitContext ctx{cfg.pair.beam1.wavelength, cfg.pair.beam1.waist_w0,
                                vl::rayleigh_range(cfg.pair.beam1), cfg.pair.beam1.wavenumber(),
                                cfg.atom.gamma, 0.0};
      if (!d_min.empty())
        cfg.sweep.d_min = vl::parse_quantity(d_min, vl::Dimension::length, ctx, "--d-min");
      if (!d_max.empty())
        cfg.sweep.d_max = vl::parse_quantity(d_max, vl::Dimension::length, ctx, "--d-max");
      if (steps != 0) {
        if (steps < 1) throw vl::ConfigError("--steps must be at least 1");
        cfg.sweep.steps = static_cast<std::size_t>(steps);
      }
      summary = vl::cmd_spring_sweep(cfg);
    } else if (*rings) {
      summary = vl::cmd_rings(cfg);
    } else if (*ferris) {
      if (!t_samples.empty()) {
        cfg.ferris.times.clear();
        for (const std::string& t : t_samples)
          cfg.ferris.times.push_back(vl::parse_quantity(t, vl::Dimension::time, {}, "--t-samples"));
      }
      summary = vl::cmd_ferris(cfg);
    } else if (*trajectory) {
      summary = vl::cmd_trajectory(cfg);
    }
    std::cout << summary.dump(2) << '\n';
    return exit_code(vl::ExitCode::ok);
  } catch (const vl::ConfigError& e) {
    std::cerr << "vlsim: configuration error: " << e.what() << '\n';
    return exit_code(vl::ExitCode::config);
  } catch (const vl::NumericalError& e) {
    std::cerr << "vlsim: numerical error: " << e.what() << '\n';
    return exit_code(vl::ExitCode::numerical);
  } catch (const vl::IoError& e) {
    std::cerr << "vlsim: I/O error: " << e.what() << '\n';
    return exit_code(vl::ExitCode::io);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "vlsim: configuration error: " << e.what() << '\n';
    return exit_code(vl::ExitCode::config);
  }
}
