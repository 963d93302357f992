// SPDX-License-Identifier: Apache-2.0

#include "fsi/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Entry {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

const std::vector<std::pair<std::string, Entry>>& schema() {
  auto str = [](std::string RunConfig::* f) {
    return Entry{[f](const RunConfig& c) { return c.*f; },
                 [f](RunConfig& c, const std::string& v) { c.*f = v; }};
  };
  auto dbl = [](double RunConfig::* f) {
    return Entry{[f](const RunConfig& c) { return fmt_double(c.*f); },
                 [f](RunConfig& c, const std::string& v) { c.*f = to_double("", v); }};
  };
  auto itg = [](int RunConfig::* f) {
    return Entry{[f](const RunConfig& c) { return std::to_string(c.*f); },
                 [f](RunConfig& c, const std::string& v) { c.*f = static_cast<int>(to_int("", v)); }};
  };
  auto lng = [](long long RunConfig::* f) {
    return Entry{[f](const RunConfig& c) { return std::to_string(c.*f); },
                 [f](RunConfig& c, const std::string& v) { c.*f = to_int("", v); }};
  };
  static const std::vector<std::pair<std::string, Entry>> s = {
      {"case", str(&RunConfig::geometry)},
      {"length", dbl(&RunConfig::length)},
      {"lumen_height", dbl(&RunConfig::lumen_height)},
      {"wall_thickness", dbl(&RunConfig::wall_thickness)},
      {"nx", itg(&RunConfig::nx)},
      {"ny_fluid", itg(&RunConfig::ny_fluid)},
      {"ny_wall", itg(&RunConfig::ny_wall)},
      {"unit_n", itg(&RunConfig::unit_n)},
      {"bulge_height", dbl(&RunConfig::bulge_height)},
      {"bulge_width", dbl(&RunConfig::bulge_width)},
      {"bulge_center", dbl(&RunConfig::bulge_center)},
      {"rho_f", dbl(&RunConfig::rho_f)},
      {"rho_s", dbl(&RunConfig::rho_s)},
      {"mu", dbl(&RunConfig::mu)},
      {"young", dbl(&RunConfig::young)},
      {"poisson", dbl(&RunConfig::poisson)},
      {"young_clot", dbl(&RunConfig::young_clot)},
      {"bc", str(&RunConfig::bc)},
      {"pulse_amplitude", dbl(&RunConfig::pulse_amplitude)},
      {"inflow_peak", dbl(&RunConfig::inflow_peak)},
      {"pulsatile", itg(&RunConfig::pulsatile)},
      {"kfun", str(&RunConfig::kfun)},
      {"kdist_a", dbl(&RunConfig::kdist_a)},
      {"kdist_a_near", dbl(&RunConfig::kdist_a_near)},
      {"kdist_c", dbl(&RunConfig::kdist_c)},
      {"kdist_x", dbl(&RunConfig::kdist_x)},
      {"kdist_y", dbl(&RunConfig::kdist_y)},
      {"kdist_stiff_set", str(&RunConfig::kdist_stiff_set)},
      {"t_step", itg(&RunConfig::t_step)},
      {"periods", itg(&RunConfig::periods)},
      {"smoother", str(&RunConfig::smoother)},
      {"ordering", str(&RunConfig::ordering)},
      {"cycle", str(&RunConfig::cycle)},
      {"levels", itg(&RunConfig::levels)},
      {"pre", itg(&RunConfig::pre)},
      {"post", itg(&RunConfig::post)},
      {"sweeps", itg(&RunConfig::sweeps)},
      {"omega", dbl(&RunConfig::omega)},
      {"elems_per_block", itg(&RunConfig::elems_per_block)},
      {"overlap_layers", itg(&RunConfig::overlap_layers)},
      {"gmres_restart", itg(&RunConfig::gmres_restart)},
      {"gmres_max_iters", itg(&RunConfig::gmres_max_iters)},
      {"gmres_rtol", dbl(&RunConfig::gmres_rtol)},
      {"gmres_atol", dbl(&RunConfig::gmres_atol)},
      {"newton_rtol", dbl(&RunConfig::newton_rtol)},
      {"newton_atol", dbl(&RunConfig::newton_atol)},
      {"newton_max", itg(&RunConfig::newton_max)},
      {"quad_points", itg(&RunConfig::quad_points)},
      {"frozen_geometry", itg(&RunConfig::frozen_geometry)},
      {"out", str(&RunConfig::out)},
      {"vtk", itg(&RunConfig::vtk)},
      {"dump_matrices", itg(&RunConfig::dump_matrices)},
      {"seed", lng(&RunConfig::seed)},
  };
  return s;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::key_values() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, entry] : schema()) out.emplace_back(key, entry.get(*this));
  return out;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, entry] : schema()) {
    if (k == key) {
      try {
        entry.set(cfg, value);
      } catch (const ConfigError&) {
        throw ConfigError("key '" + key + "': cannot parse value '" + value + "'");
      }
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!line.empty() && is_space(line.front())) line.erase(line.begin());
    while (!line.empty() && is_space(line.back())) line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    while (!key.empty() && is_space(key.back())) key.pop_back();
    while (!value.empty() && is_space(value.front())) value.erase(value.begin());
    apply_override(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream ss(text);
  return parse_config(ss);
}

void write_manifest(std::ostream& os, const RunConfig& cfg) {
  os << "# effective configuration (re-parseable)\n";
  for (const auto& [k, v] : cfg.key_values()) os << k << " = " << v << "\n";
}

void write_manifest_file(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write manifest '" + path + "'");
  write_manifest(os, cfg);
}

std::vector<std::string> RunConfig::smoother_list() const {
  std::vector<std::string> out;
  std::string cur;
  for (char c : smoother + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

GeometryCase RunConfig::geometry_case() const {
  GeometryCase geo;
  geo.name = geometry;
  geo.length = length;
  geo.lumen_height = lumen_height;
  geo.wall_thickness = wall_thickness;
  geo.nx = nx;
  geo.ny_fluid = ny_fluid;
  geo.ny_wall = ny_wall;
  geo.unit_n = unit_n;
  if (geometry == "bulge") {
    geo.bulge_height = bulge_height;
    geo.bulge_width = bulge_width;
    geo.bulge_center = bulge_center;
  }
  return geo;
}

MaterialParams RunConfig::material() const {
  MaterialParams m;
  m.rho_f = rho_f;
  m.rho_s = rho_s;
  m.mu = mu;
  m.young = young;
  m.poisson = poisson;
  m.young_clot = young_clot;
  return m;
}

KFunction RunConfig::k_function() const {
  KFunction k;
  if (kfun == "inverse_volume") {
    k.kind = KFunction::Kind::InverseVolume;
  } else if (kfun == "distance") {
    k.kind = KFunction::Kind::Distance;
    k.a_far = kdist_a;
    k.a_near = kdist_a_near;
    k.c = kdist_c;
    k.point = {kdist_x, kdist_y};
    k.stiff_set = kdist_stiff_set;
  } else {
    throw ConfigError("kfun must be inverse_volume or distance");
  }
  return k;
}

std::vector<BoundaryCondition> RunConfig::boundary_conditions() const {
  std::vector<BoundaryCondition> bcs;
  if (geometry == "unit_square") return bcs;  // test geometry: caller supplies conditions

  BoundaryCondition cin;
  cin.group = "clamp_in";
  cin.kind = BcKind::DisplacementDirichlet;
  BoundaryCondition cout = cin;
  cout.group = "clamp_out";

  if (bc == "pulse") {
    BoundaryCondition inlet;
    inlet.group = "inlet";
    inlet.kind = BcKind::NormalStress;
    inlet.stress_amplitude = pulse_amplitude;
    BoundaryCondition outlet = inlet;
    outlet.group = "outlet";
    outlet.stress_amplitude = -pulse_amplitude;
    bcs = {inlet, outlet, cin, cout};
  } else if (bc == "inflow") {
    BoundaryCondition inlet;
    inlet.group = "inlet";
    inlet.kind = BcKind::VelocityDirichlet;
    inlet.profile_peak = inflow_peak;
    inlet.velocity_direction = {1.0, 0.0};
    inlet.profile_axis = 1;
    inlet.profile_center = 0.0;
    inlet.profile_radius = 0.5 * lumen_height;
    inlet.pulsatile = pulsatile != 0;
    BoundaryCondition din;
    din.group = "inlet";
    din.kind = BcKind::DisplacementDirichlet;
    BoundaryCondition outlet;
    outlet.group = "outlet";
    outlet.kind = BcKind::ZeroStress;
    BoundaryCondition dout;
    dout.group = "outlet";
    dout.kind = BcKind::DisplacementDirichlet;
    bcs = {inlet, din, outlet, dout, cin, cout};
  } else {
    throw ConfigError("bc must be pulse or inflow");
  }
  return bcs;
}

SolverConfig RunConfig::solver_config(const std::string& name) const {
  SolverConfig sc;
  if (name == "as") {
    sc.kind = SolverConfig::Kind::AS;
  } else if (name == "fs") {
    sc.kind = SolverConfig::Kind::FS;
  } else if (name == "direct") {
    sc.kind = SolverConfig::Kind::Direct;
  } else {
    throw ConfigError("smoother must be as, fs or direct (got '" + name + "')");
  }
  sc.cycle.cycle = cycle.empty() ? 'v' : cycle[0];
  sc.cycle.pre = sweeps > 0 ? sweeps : pre;
  sc.cycle.post = sweeps > 0 ? sweeps : post;
  sc.cycle.omega = omega;
  sc.elems_per_block = elems_per_block;
  sc.overlap_layers = overlap_layers;
  sc.krylov.restart = gmres_restart;
  sc.krylov.max_iters = gmres_max_iters;
  sc.krylov.rel_tol = gmres_rtol;
  sc.krylov.abs_tol = gmres_atol;
  sc.newton_rtol = newton_rtol;
  sc.newton_atol = newton_atol;
  sc.newton_max = newton_max;
  return sc;
}

void RunConfig::validate() const {
  if (t_step < 1) throw ConfigError("t_step must be positive (dt = 1/t_step)");
  if (periods < 1) throw ConfigError("periods must be positive");
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (quad_points < 3 || quad_points > 4) throw ConfigError("quad_points must be 3 or 4");
  if (omega < 0.0 || omega >= 2.0) throw ConfigError("omega must lie in [0, 2)");
  if (elems_per_block < 1) throw ConfigError("elems_per_block must be >= 1");
  if (gmres_restart < 1 || gmres_max_iters < 1) throw ConfigError("gmres limits must be positive");
  if (gmres_rtol <= 0 || gmres_atol <= 0 || newton_rtol <= 0 || newton_atol <= 0)
    throw ConfigError("tolerances must be positive");
  if (cycle != "v" && cycle != "f" && cycle != "w") throw ConfigError("cycle must be v, f or w");
  material().validate();

  for (const auto& name : smoother_list()) {
    if (name != "as" && name != "fs" && name != "direct")
      throw ConfigError("smoother must be as, fs or direct (got '" + name + "')");
    // the additive Schwarz smoother runs on J1, the field split on J2
    if (ordering != "auto") {
      if (name == "as" && ordering != "j1")
        throw ConfigError("smoother=as requires ordering=j1 (or auto)");
      if (name == "fs" && ordering != "j2")
        throw ConfigError("smoother=fs requires ordering=j2 (or auto)");
    }
  }
  if (ordering != "auto" && ordering != "j1" && ordering != "j2")
    throw ConfigError("ordering must be auto, j1 or j2");
  if (smoother_list().empty()) throw ConfigError("no smoother selected");
}

}  // namespace fsi
