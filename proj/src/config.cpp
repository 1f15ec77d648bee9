#include "vl/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "vl/constants.hpp"
#include "vl/errors.hpp"

namespace vl {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double relative(double scale, const char* unit, const std::string& key) {
  if (!(scale > 0.0))
    throw ConfigError(key + ": unit '" + unit + "' is not available at this point of the config");
  return scale;
}

double unit_factor(const std::string& unit, Dimension dim, const UnitContext& ctx,
                   const std::string& key) {
  switch (dim) {
    case Dimension::length:
      if (unit == "m") return 1.0;
      if (unit == "cm") return 1e-2;
      if (unit == "mm") return 1e-3;
      if (unit == "um") return 1e-6;
      if (unit == "nm") return 1e-9;
      if (unit == "lambda") return relative(ctx.lambda, "lambda", key);
      if (unit == "w0") return relative(ctx.w0, "w0", key);
      if (unit == "zR") return relative(ctx.zr, "zR", key);
      if (unit == "rho0") return relative(ctx.rho0, "rho0", key);
      break;
    case Dimension::angular_frequency:
      if (unit == "rad/s") return 1.0;
      if (unit == "Hz") return 2.0 * kPi;
      if (unit == "kHz") return 2.0 * kPi * 1e3;
      if (unit == "MHz") return 2.0 * kPi * 1e6;
      if (unit == "GHz") return 2.0 * kPi * 1e9;
      if (unit == "gamma") return relative(ctx.gamma, "gamma", key);
      break;
    case Dimension::time:
      if (unit == "s") return 1.0;
      if (unit == "ms") return 1e-3;
      if (unit == "us") return 1e-6;
      if (unit == "ns") return 1e-9;
      break;
    case Dimension::mass:
      if (unit == "kg") return 1.0;
      if (unit == "amu") return kAtomicMassUnit;
      break;
    case Dimension::wavenumber:
      if (unit == "1/m" || unit == "rad/m") return 1.0;
      if (unit == "k") return relative(ctx.k, "k", key);
      break;
    case Dimension::dimensionless:
      break;
  }
  throw ConfigError(key + ": unknown or mismatched unit '" + unit + "'");
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

const json& section(const json& doc, const char* name) {
  static const json empty = json::object();
  return doc.contains(name) ? doc.at(name) : empty;
}

int get_int(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be true or false");
  return v.get<bool>();
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback,
                      const std::string& where) {
  const int n = get_int(obj, key, static_cast<int>(fallback), where);
  if (n < 1) throw ConfigError(where + "." + key + " must be at least 1");
  return static_cast<std::size_t>(n);
}

double get_q(const json& obj, const char* key, double fallback, Dimension dim,
             const UnitContext& ctx, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return parse_quantity(obj.at(key), dim, ctx, where + "." + key);
}

std::string get_str(const json& obj, const char* key, const std::string& fallback,
                    const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + " must be a string");
  return obj.at(key).get<std::string>();
}

BeamSpec parse_beam(const json& common, const json& own, const std::string& where,
                    UnitContext& ctx) {
  const std::initializer_list<const char*> keys = {"wavelength", "w0", "l", "p", "amp", "sign",
                                                   "norm"};
  check_keys(common, "beam", keys);
  check_keys(own, where, keys);
  json merged = common;
  for (const auto& [k, v] : own.items()) merged[k] = v;

  BeamSpec b;
  b.wavelength = get_q(merged, "wavelength", b.wavelength, Dimension::length, ctx, where);
  if (ctx.lambda == 0.0) ctx.lambda = b.wavelength;
  b.waist_w0 = get_q(merged, "w0", b.waist_w0, Dimension::length, ctx, where);
  b.winding_l = get_int(merged, "l", b.winding_l, where);
  b.radial_p = get_int(merged, "p", b.radial_p, where);
  if (merged.contains("amp")) {
    if (!merged.at("amp").is_number()) throw ConfigError(where + ".amp must be a number");
    b.amp_scale = merged.at("amp").get<double>();
  }
  b.azimuthal_sign = get_int(merged, "sign", b.azimuthal_sign, where);
  if (merged.contains("norm")) {
    if (!merged.at("norm").is_number()) throw ConfigError(where + ".norm must be a number");
    b.norm_override = merged.at("norm").get<double>();
  }
  return b;
}

struct Axis {
  double min{0.0};
  double max{0.0};
  std::size_t n{1};
};

Axis parse_axis(const json& obj, const std::string& where, const UnitContext& ctx) {
  check_keys(obj, where, {"min", "max", "n"});
  Axis a;
  a.min = get_q(obj, "min", 0.0, Dimension::length, ctx, where);
  a.max = get_q(obj, "max", a.min, Dimension::length, ctx, where);
  a.n = get_count(obj, "n", 1, where);
  return a;
}

GridSpec parse_grid(const json& obj, const UnitContext& ctx) {
  check_keys(obj, "grid", {"plane", "rho", "z", "x", "y", "phi", "t"});
  GridSpec g;
  const std::string plane = get_str(obj, "plane", "rho_z", "grid");
  const bool rz = plane == "rho_z";
  if (!rz && plane != "xy") throw ConfigError("grid.plane must be 'rho_z' or 'xy'");
  g.plane = rz ? Plane::rho_z : Plane::xy;
  const char* an = rz ? "rho" : "x";
  const char* bn = rz ? "z" : "y";
  if (!obj.contains(an) || !obj.contains(bn))
    throw ConfigError(std::string("grid needs '") + an + "' and '" + bn + "' axes");
  const Axis a = parse_axis(obj.at(an), std::string("grid.") + an, ctx);
  const Axis b = parse_axis(obj.at(bn), std::string("grid.") + bn, ctx);
  g.a_min = a.min;
  g.a_max = a.max;
  g.n_a = a.n;
  g.b_min = b.min;
  g.b_max = b.max;
  g.n_b = b.n;
  if (rz) {
    if (obj.contains("phi"))
      g.fixed = parse_quantity(obj.at("phi"), Dimension::dimensionless, ctx, "grid.phi");
  } else if (obj.contains("phi")) {
    throw ConfigError("grid.phi applies to rho_z planes only");
  }
  g.t = get_q(obj, "t", 0.0, Dimension::time, ctx, "grid");
  g.validate();
  return g;
}

}  // namespace

double parse_quantity(const json& value, Dimension dim, const UnitContext& ctx,
                      const std::string& key) {
  double out = 0.0;
  if (value.is_number()) {
    out = value.get<double>();
  } else if (value.is_string()) {
    const std::string text = trim(value.get<std::string>());
    if (text.empty()) throw ConfigError(key + ": empty value");
    errno = 0;
    char* end = nullptr;
    const double number = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || errno == ERANGE)
      throw ConfigError(key + ": cannot parse number in '" + text + "'");
    const std::string unit = trim(std::string(end));
    out = unit.empty() ? number : number * unit_factor(unit, dim, ctx, key);
  } else {
    throw ConfigError(key + " must be a number or a unit-suffixed string");
  }
  if (!std::isfinite(out)) throw ConfigError(key + " must be finite");
  return out;
}

PhaseModel parse_phase_model(const std::string& name) {
  if (name == "full") return PhaseModel::full;
  if (name == "reduced") return PhaseModel::reduced;
  throw ConfigError("phase model must be 'reduced' or 'full', got '" + name + "'");
}

void apply_phase_model(RunConfig& cfg, PhaseModel model) {
  cfg.phase_model = model;
  cfg.force.phase_model = model;
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "config", {"beam", "beam1", "beam2", "pair", "atom", "mode", "grid", "slices",
                             "sweep", "ferris", "trajectory", "rings", "output", "description"});
  RunConfig cfg;
  cfg.source = doc;
  UnitContext ctx;

  // Beams first: they define lambda, w0, zR and k for the rest of the document.
  const json& common = section(doc, "beam");
  BeamSpec b1 = parse_beam(common, section(doc, "beam1"), "beam1", ctx);
  ctx.w0 = b1.waist_w0;
  ctx.zr = kPi * b1.waist_w0 * b1.waist_w0 / b1.wavelength;
  ctx.k = 2.0 * kPi / b1.wavelength;
  BeamSpec b2 = parse_beam(common, section(doc, "beam2"), "beam2", ctx);

  const json& p = section(doc, "pair");
  check_keys(p, "pair", {"d", "delta_omega", "delta_k", "handedness", "reference_amplitude"});
  const std::string hand = get_str(p, "handedness", "opposite", "pair");
  if (hand != "opposite" && hand != "same")
    throw ConfigError("pair.handedness must be 'opposite' or 'same'");
  // The handedness names the default for beam 2; an explicit beam2.sign wins.
  if (!section(doc, "beam2").contains("sign") && !common.contains("sign"))
    b2.azimuthal_sign = hand == "opposite" ? -b1.azimuthal_sign : b1.azimuthal_sign;
  const double d = get_q(p, "d", 0.0, Dimension::length, ctx, "pair");
  const double dw = get_q(p, "delta_omega", 0.0, Dimension::angular_frequency, ctx, "pair");
  const double dk = get_q(p, "delta_k", 0.0, Dimension::wavenumber, ctx, "pair");
  cfg.pair = make_pair(b1, b2, d, dw, dk);
  if (p.contains("reference_amplitude"))
    cfg.pair.reference_amplitude = parse_quantity(p.at("reference_amplitude"),
                                                  Dimension::dimensionless, ctx,
                                                  "pair.reference_amplitude");
  cfg.pair.validate();
  try {
    ctx.rho0 = central_ring_radius(cfg.pair);
  } catch (const ConfigError&) {
    ctx.rho0 = 0.0;
  }

  const json& a = section(doc, "atom");
  check_keys(a, "atom", {"gamma", "delta0", "omega0", "mass"});
  cfg.atom.gamma = get_q(a, "gamma", cfg.atom.gamma, Dimension::angular_frequency, ctx, "atom");
  ctx.gamma = cfg.atom.gamma;
  cfg.atom.delta0 = get_q(a, "delta0", cfg.atom.delta0, Dimension::angular_frequency, ctx, "atom");
  cfg.atom.omega0_rabi =
      get_q(a, "omega0", cfg.atom.omega0_rabi, Dimension::angular_frequency, ctx, "atom");
  cfg.atom.mass = get_q(a, "mass", cfg.atom.mass, Dimension::mass, ctx, "atom");
  cfg.atom.validate();

  const json& m = section(doc, "mode");
  check_keys(m, "mode", {"phase_model", "coupling", "velocity_coupling"});
  apply_phase_model(cfg, parse_phase_model(get_str(m, "phase_model", "full", "mode")));
  const std::string coupling = get_str(m, "coupling", "sum_of_beams", "mode");
  if (coupling == "sum_of_beams") {
    cfg.force.coupling = Coupling::sum_of_beams;
  } else if (coupling == "total_field") {
    cfg.force.coupling = Coupling::total_field;
  } else {
    throw ConfigError("mode.coupling must be 'sum_of_beams' or 'total_field'");
  }
  cfg.force.velocity_coupling = get_bool(m, "velocity_coupling", true, "mode");

  if (doc.contains("grid")) cfg.grid = parse_grid(doc.at("grid"), ctx);

  if (doc.contains("slices")) {
    const json& s = doc.at("slices");
    check_keys(s, "slices", {"z", "x", "y", "t"});
    if (!s.contains("z") || !s.at("z").is_array()) throw ConfigError("slices.z must be a list");
    for (std::size_t i = 0; i < s.at("z").size(); ++i)
      cfg.slice_z.push_back(
          parse_quantity(s.at("z")[i], Dimension::length, ctx, "slices.z[" + std::to_string(i) + "]"));
    if (!s.contains("x") || !s.contains("y")) throw ConfigError("slices need 'x' and 'y' axes");
    const Axis x = parse_axis(s.at("x"), "slices.x", ctx);
    const Axis y = parse_axis(s.at("y"), "slices.y", ctx);
    cfg.slice_grid = GridSpec{Plane::xy, x.min, x.max, x.n, y.min, y.max, y.n, 0.0,
                              get_q(s, "t", 0.0, Dimension::time, ctx, "slices")};
    cfg.slice_grid.validate();
  }

  const json& sw = section(doc, "sweep");
  check_keys(sw, "sweep", {"d_min", "d_max", "steps"});
  cfg.sweep.d_min = get_q(sw, "d_min", 0.0, Dimension::length, ctx, "sweep");
  cfg.sweep.d_max = get_q(sw, "d_max", cfg.sweep.d_min, Dimension::length, ctx, "sweep");
  cfg.sweep.steps = get_count(sw, "steps", 50, "sweep");

  const json& f = section(doc, "ferris");
  check_keys(f, "ferris", {"times", "n_phi", "track_span"});
  if (f.contains("times")) {
    if (!f.at("times").is_array()) throw ConfigError("ferris.times must be a list");
    for (std::size_t i = 0; i < f.at("times").size(); ++i)
      cfg.ferris.times.push_back(parse_quantity(f.at("times")[i], Dimension::time, ctx,
                                                "ferris.times[" + std::to_string(i) + "]"));
  }
  cfg.ferris.n_phi = get_count(f, "n_phi", cfg.ferris.n_phi, "ferris");
  cfg.ferris.track_span =
      get_q(f, "track_span", 0.5 * b1.wavelength, Dimension::length, ctx, "ferris");

  const json& tr = section(doc, "trajectory");
  check_keys(tr, "trajectory", {"rho", "phi", "z", "v_rho", "v_phi", "v_z", "step", "duration",
                                "stride", "scattering", "dipole", "azimuthal", "check_step"});
  TrajectoryConfig& tc = cfg.trajectory;
  tc.start.rho = get_q(tr, "rho", ctx.rho0, Dimension::length, ctx, "trajectory");
  tc.start.phi = get_q(tr, "phi", 0.0, Dimension::dimensionless, ctx, "trajectory");
  tc.start.z = get_q(tr, "z", 0.0, Dimension::length, ctx, "trajectory");
  if (tc.start.rho < 0.0) throw ConfigError("trajectory.rho must be non-negative");
  // Velocities are plain m/s.
  tc.velocity.rho = get_q(tr, "v_rho", 0.0, Dimension::dimensionless, ctx, "trajectory");
  tc.velocity.phi = get_q(tr, "v_phi", 0.0, Dimension::dimensionless, ctx, "trajectory");
  tc.velocity.z = get_q(tr, "v_z", 0.0, Dimension::dimensionless, ctx, "trajectory");
  IntegratorConfig& ic = tc.integrator;
  ic.step = get_q(tr, "step", ic.step, Dimension::time, ctx, "trajectory");
  ic.duration = get_q(tr, "duration", ic.duration, Dimension::time, ctx, "trajectory");
  ic.sample_stride = get_count(tr, "stride", 1, "trajectory");
  ic.scattering = get_bool(tr, "scattering", true, "trajectory");
  ic.dipole = get_bool(tr, "dipole", true, "trajectory");
  ic.azimuthal = get_bool(tr, "azimuthal", true, "trajectory");
  ic.check_step = get_bool(tr, "check_step", true, "trajectory");
  ic.force = cfg.force;
  ic.validate();

  const json& r = section(doc, "rings");
  check_keys(r, "rings", {"min_contrast", "enforce_resolution"});
  if (r.contains("min_contrast"))
    cfg.rings.min_contrast = parse_quantity(r.at("min_contrast"), Dimension::dimensionless, ctx,
                                            "rings.min_contrast");
  cfg.rings.enforce_resolution = get_bool(r, "enforce_resolution", true, "rings");

  const json& o = section(doc, "output");
  check_keys(o, "output", {"dir"});
  cfg.out_dir = get_str(o, "dir", "out", "output");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

namespace {

json beam_json(const BeamSpec& b) {
  json j = {{"wavelength", b.wavelength}, {"w0", b.waist_w0},     {"l", b.winding_l},
            {"p", b.radial_p},            {"direction", b.direction}, {"focal_z", b.focal_z},
            {"amp", b.amp_scale},         {"sign", b.azimuthal_sign},
            {"rayleigh_range", rayleigh_range(b)}};
  if (b.norm_override) j["norm"] = *b.norm_override;
  return j;
}

json grid_json(const GridSpec& g) {
  const bool rz = g.plane == Plane::rho_z;
  return {{"plane", rz ? "rho_z" : "xy"},
          {rz ? "rho" : "x", {{"min", g.a_min}, {"max", g.a_max}, {"n", g.n_a}}},
          {rz ? "z" : "y", {{"min", g.b_min}, {"max", g.b_max}, {"n", g.n_b}}},
          {rz ? "phi" : "z", g.fixed},
          {"t", g.t}};
}

}  // namespace

json config_metadata(const RunConfig& cfg) {
  json j;
  j["beam1"] = beam_json(cfg.pair.beam1);
  j["beam2"] = beam_json(cfg.pair.beam2);
  j["pair"] = {{"d", cfg.pair.separation_d},
               {"delta_omega", cfg.pair.delta_omega},
               {"delta_k", cfg.pair.delta_k},
               {"reference_amplitude", cfg.pair.reference_amplitude}};
  j["atom"] = {{"gamma", cfg.atom.gamma},
               {"delta0", cfg.atom.delta0},
               {"omega0", cfg.atom.omega0_rabi},
               {"mass", cfg.atom.mass}};
  j["mode"] = {{"phase_model", cfg.phase_model == PhaseModel::full ? "full" : "reduced"},
               {"coupling",
                cfg.force.coupling == Coupling::sum_of_beams ? "sum_of_beams" : "total_field"},
               {"velocity_coupling", cfg.force.velocity_coupling}};
  if (cfg.grid) j["grid"] = grid_json(*cfg.grid);
  if (!cfg.slice_z.empty()) {
    j["slices"] = grid_json(cfg.slice_grid);
    j["slices"]["z"] = cfg.slice_z;
  }
  j["units"] = "SI (m, s, kg, rad/s)";
  return j;
}

unsigned resolve_thread_count(unsigned requested) {
  if (const char* env = std::getenv("VL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace vl
