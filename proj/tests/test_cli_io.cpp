#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vl/commands.hpp"
#include "vl/config.hpp"
#include "vl/constants.hpp"
#include "vl/errors.hpp"
#include "vl/parallel.hpp"

using namespace vl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kLambda = 589.16e-9;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vl_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json fig2_doc() {
  return json::parse(R"({
    "beam": { "wavelength": "589.16nm", "w0": "8um", "l": 1 },
    "pair": { "d": "1zR" },
    "atom": { "gamma": "10.01MHz", "delta0": "0.5gamma", "omega0": "1gamma", "mass": "22.98977amu" },
    "mode": { "phase_model": "reduced", "velocity_coupling": false },
    "sweep": { "d_min": 0, "d_max": "6zR", "steps": 5 }
  })");
}

int run_vlsim(const std::string& args) {
  const std::string cmd = std::string(VLSIM_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_doc(const fs::path& dir, const std::string& name, const json& doc) {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

}  // namespace

TEST_CASE("unit suffixes") {
  UnitContext ctx{kLambda, 8e-6, 3.4e-4, 2.0 * kPi / kLambda, 2.0 * kPi * 10.01e6, 6e-6};
  auto q = [&](const char* s, Dimension d) { return parse_quantity(json(s), d, ctx, "x"); };
  CHECK(q("8um", Dimension::length) == doctest::Approx(8e-6).epsilon(1e-15));
  CHECK(q("589.16nm", Dimension::length) == doctest::Approx(kLambda).epsilon(1e-15));
  CHECK(q(" 2 w0", Dimension::length) == 1.6e-5);
  CHECK(q("0.5zR", Dimension::length) == 1.7e-4);
  CHECK(q("1rho0", Dimension::length) == 6e-6);
  CHECK(q("3lambda", Dimension::length) == 3.0 * kLambda);
  CHECK(q("10.01MHz", Dimension::angular_frequency) == doctest::Approx(2.0 * kPi * 10.01e6).epsilon(1e-15));
  CHECK(q("-0.5gamma", Dimension::angular_frequency) == -0.5 * ctx.gamma);
  CHECK(q("20us", Dimension::time) == doctest::Approx(2e-5).epsilon(1e-15));
  CHECK(q("1amu", Dimension::mass) == kAtomicMassUnit);
  CHECK(q("0.001k", Dimension::wavenumber) == doctest::Approx(1e-3 * ctx.k));
  CHECK(parse_quantity(json(1.25e-6), Dimension::length, ctx, "x") == 1.25e-6);
  CHECK(q("7", Dimension::time) == 7.0);

  CHECK_THROWS_AS(q("8 parsec", Dimension::length), ConfigError);
  CHECK_THROWS_AS(q("8MHz", Dimension::length), ConfigError);
  CHECK_THROWS_AS(q("um", Dimension::length), ConfigError);
  CHECK_THROWS_AS(q("", Dimension::length), ConfigError);
  CHECK_THROWS_AS(parse_quantity(json(true), Dimension::length, ctx, "x"), ConfigError);
  CHECK_THROWS_AS(parse_quantity(json("1w0"), Dimension::length, UnitContext{}, "x"), ConfigError);
}

TEST_CASE("config parsing") {
  SUBCASE("resolved values") {
    const RunConfig cfg = parse_config(fig2_doc());
    const double zr = kPi * 64e-12 / kLambda;
    CHECK(cfg.pair.separation_d == doctest::Approx(zr).epsilon(1e-14));
    CHECK(cfg.pair.beam2.azimuthal_sign == -cfg.pair.beam1.azimuthal_sign);
    CHECK(cfg.atom.delta0 == doctest::Approx(0.5 * cfg.atom.gamma).epsilon(1e-15));
    CHECK(cfg.atom.mass == doctest::Approx(22.98977 * kAtomicMassUnit).epsilon(1e-15));
    CHECK(cfg.phase_model == PhaseModel::reduced);
    CHECK_FALSE(cfg.force.velocity_coupling);
    CHECK(cfg.trajectory.start.rho == doctest::Approx(central_ring_radius(cfg.pair)));
  }
  SUBCASE("metadata echoes SI values") {
    const RunConfig cfg = parse_config(fig2_doc());
    const json meta = config_metadata(cfg);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    CHECK(rel(meta["beam1"]["wavelength"].get<double>(), 589.16e-9) <= 1e-12);
    CHECK(rel(meta["beam1"]["w0"].get<double>(), 8e-6) <= 1e-12);
    CHECK(rel(meta["atom"]["gamma"].get<double>(), 2.0 * kPi * 10.01e6) <= 1e-12);
    CHECK(rel(meta["atom"]["delta0"].get<double>(), kPi * 10.01e6) <= 1e-12);
    CHECK(rel(meta["pair"]["d"].get<double>(), kPi * 64e-12 / 589.16e-9) <= 1e-12);
    // Parsing the echo reproduces the same numbers.
    json again = fig2_doc();
    again["beam"]["wavelength"] = meta["beam1"]["wavelength"];
    again["pair"]["d"] = meta["pair"]["d"];
    const RunConfig back = parse_config(again);
    CHECK(back.pair.separation_d == meta["pair"]["d"].get<double>());
  }
  SUBCASE("rejections") {
    json doc = fig2_doc();
    doc["beam"]["waist"] = "8um";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = fig2_doc();
    doc["extra"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = fig2_doc();
    doc["pair"]["handedness"] = "left";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = fig2_doc();
    doc["beam"]["w0"] = "-8um";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = fig2_doc();
    doc["mode"]["phase_model"] = "exact";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = fig2_doc();
    doc["beam"]["l"] = 1.5;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
  }
  SUBCASE("bundled configurations") {
    for (const char* name : {"fig2.json", "fig3.json", "fig4.json", "ferris.json", "trajectory.json"}) {
      CAPTURE(name);
      CHECK_NOTHROW(load_config(fs::path(VL_CONFIG_DIR) / name));
    }
    const RunConfig f3 = load_config(fs::path(VL_CONFIG_DIR) / "fig3.json");
    CHECK(f3.pair.beam1.winding_l == 80);
    CHECK(f3.pair.beam1.waist_w0 == doctest::Approx(6.0 * kLambda));
    CHECK(f3.pair.separation_d == doctest::Approx(144.0 * kLambda));
  }
}

TEST_CASE("thread count") {
  unsetenv("VL_THREADS");
  CHECK(resolve_thread_count(3) == 3);
  CHECK(resolve_thread_count(0) >= 1);
  setenv("VL_THREADS", "5", 1);
  CHECK(resolve_thread_count(3) == 5);
  setenv("VL_THREADS", "junk", 1);
  CHECK(resolve_thread_count(3) == 3);
  unsetenv("VL_THREADS");
}

TEST_CASE("commands") {
  SUBCASE("spring sweep") {
    RunConfig cfg = parse_config(fig2_doc());
    cfg.out_dir = scratch("sweep");
    const json s = cmd_spring_sweep(cfg);
    CHECK(s["points"] == 5);
    CHECK(s["max_relative_disagreement"].get<double>() <= 1e-6);
    const std::string csv = slurp(cfg.out_dir / "spring_sweep.csv");
    CHECK(csv.rfind("d,K0_analytic,K0_numeric\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(fs::exists(cfg.out_dir / "metadata.json"));

    cfg.sweep.d_max = cfg.sweep.d_min = 2e-4;
    cfg.out_dir = scratch("sweep_single");
    CHECK(cmd_spring_sweep(cfg)["points"] == 1);
    cfg.sweep.d_min = -1.0;
    CHECK_THROWS_AS(cmd_spring_sweep(cfg), DomainError);
  }
  SUBCASE("sweep points") {
    const std::vector<double> d = sweep_points({0.0, 1.0, 5});
    REQUIRE(d.size() == 5);
    CHECK(d.front() == 0.0);
    CHECK(d.back() == 1.0);
    CHECK(d[2] == 0.5);
  }
  SUBCASE("deterministic output") {
    json doc = fig2_doc();
    doc["grid"] = json::parse(R"({"plane": "rho_z", "rho": {"min": "0.5w0", "max": "1.5w0", "n": 30},
                                  "z": {"min": "-2lambda", "max": "2lambda", "n": 41}})");
    RunConfig cfg = parse_config(doc);
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    cfg.out_dir = a;
    set_thread_count(4);
    cmd_field_map(cfg);
    cfg.out_dir = b;
    set_thread_count(1);
    cmd_field_map(cfg);
    set_thread_count(0);
    const std::string first = slurp(a / "field_map.csv");
    CHECK(std::count(first.begin(), first.end(), '\n') == 30 * 41 + 1);
    CHECK(first == slurp(b / "field_map.csv"));
  }
  SUBCASE("rings with coincident foci") {
    json doc = fig2_doc();
    doc["beam"]["w0"] = "4lambda";
    doc["beam"]["l"] = 2;
    doc["pair"]["d"] = 0;
    doc["grid"] = json::parse(R"({"plane": "rho_z", "rho": {"min": "0.5w0", "max": "1.7w0", "n": 121},
                                  "z": {"min": "-2lambda", "max": "2lambda", "n": 161}})");
    RunConfig cfg = parse_config(doc);
    cfg.out_dir = scratch("rings_d0");
    const json s = cmd_rings(cfg);
    const json rings = json::parse(slurp(cfg.out_dir / "rings.json"));
    CHECK(rings["splittings"].empty());
    CHECK(rings["rings"].size() == s["ring_count"].get<std::size_t>());
    CHECK(fs::exists(cfg.out_dir / "rings_comparison.csv"));
  }
  SUBCASE("ferris needs a frequency offset") {
    RunConfig cfg = parse_config(fig2_doc());
    cfg.out_dir = scratch("ferris");
    CHECK_THROWS_AS(cmd_ferris(cfg), DomainError);
  }
  SUBCASE("field map needs a grid") {
    RunConfig cfg = parse_config(fig2_doc());
    CHECK_THROWS_AS(cmd_field_map(cfg), ConfigError);
  }
}

TEST_CASE("vlsim exit codes") {
  const fs::path dir = scratch("exit");
  const fs::path good = write_doc(dir, "good.json", fig2_doc());
  CHECK(run_vlsim("--config " + good.string() + " --out " + (dir / "out").string() + " spring-sweep") == 0);
  CHECK(run_vlsim("--config " + good.string() + " --out " + (dir / "one").string() +
                  " spring-sweep --d-min 1zR --d-max 1zR") == 0);
  CHECK(slurp(dir / "one" / "spring_sweep.csv").find('\n', 25) != std::string::npos);

  json bad = fig2_doc();
  bad["atom"]["gamma"] = "10.01 furlongs";
  const fs::path bad_path = write_doc(dir, "bad.json", bad);
  CHECK(run_vlsim("--config " + bad_path.string() + " spring-sweep") == 2);
  CHECK(run_vlsim("--config " + good.string() + " no-such-command") == 2);
  CHECK(run_vlsim("spring-sweep") == 2);
  CHECK(run_vlsim("--config " + good.string() + " --mode exact spring-sweep") == 2);
  CHECK(run_vlsim("--help") == 0);

  json coarse = fig2_doc();
  coarse["grid"] = json::parse(R"({"plane": "rho_z", "rho": {"min": "0.5w0", "max": "1.5w0", "n": 5},
                                   "z": {"min": "-1zR", "max": "1zR", "n": 11}})");
  const fs::path coarse_path = write_doc(dir, "coarse.json", coarse);
  CHECK(run_vlsim("--config " + coarse_path.string() + " --out " + (dir / "c").string() + " rings") == 3);

  std::ofstream(dir / "blocker") << "not a directory";
  CHECK(run_vlsim("--config " + good.string() + " --out " + (dir / "blocker" / "sub").string() +
                  " spring-sweep") == 4);
  CHECK(run_vlsim("--config " + (dir / "missing.json").string() + " spring-sweep") == 4);
}

TEST_CASE("byte-identical reruns through the tool") {
  const fs::path dir = scratch("rerun");
  json doc = fig2_doc();
  doc["grid"] = json::parse(R"({"plane": "rho_z", "rho": {"min": "0.5w0", "max": "1.5w0", "n": 40},
                                "z": {"min": "-3lambda", "max": "3lambda", "n": 61}})");
  const fs::path cfg = write_doc(dir, "cfg.json", doc);
  REQUIRE(run_vlsim("--config " + cfg.string() + " --threads 1 --out " + (dir / "a").string() + " field-map") == 0);
  REQUIRE(run_vlsim("--config " + cfg.string() + " --threads 8 --out " + (dir / "b").string() + " field-map") == 0);
  CHECK(slurp(dir / "a" / "field_map.csv") == slurp(dir / "b" / "field_map.csv"));
  CHECK(slurp(dir / "a" / "metadata.json") == slurp(dir / "b" / "metadata.json"));
}
