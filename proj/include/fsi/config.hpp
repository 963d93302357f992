// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value run configuration: parsing, validation, defaults, and
// the reproducibility manifest. Every effective value round-trips through
// the manifest bitwise.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fsi/assembly.hpp"
#include "fsi/driver.hpp"
#include "fsi/mesh.hpp"

namespace fsi {

struct RunConfig {
  // geometry
  std::string geometry = "channel";  // channel | bulge | unit_square
  double length = 0.01;
  double lumen_height = 0.002;
  double wall_thickness = 0.00025;
  int nx = 8, ny_fluid = 4, ny_wall = 2;
  int unit_n = 2;
  double bulge_height = 0.0008;
  double bulge_width = 0.004;
  double bulge_center = 0.005;

  // materials (arterial wall and blood defaults)
  double rho_f = 1035.0, rho_s = 1120.0;
  double mu = 3.5e-3;
  double young = 1.0e6, poisson = 0.5, young_clot = 3.0e3;

  // boundary drive
  std::string bc = "pulse";  // pulse | inflow
  double pulse_amplitude = 0.05;  // Pa
  double inflow_peak = -0.05;     // m/s
  int pulsatile = 1;

  // mesh motion stiffness
  std::string kfun = "inverse_volume";  // inverse_volume | distance
  double kdist_a = 1.0, kdist_a_near = 100.0, kdist_c = 10000.0;
  double kdist_x = 0.0, kdist_y = 0.0;
  std::string kdist_stiff_set;

  // time stepping
  int t_step = 32;
  int periods = 1;

  // solver
  std::string smoother = "as";  // as | fs | direct, comma separated list
  std::string ordering = "auto";  // auto | j1 | j2
  std::string cycle = "v";        // v | f | w
  int levels = 3;
  int pre = 1, post = 1, sweeps = 0;  // sweeps > 0 overrides pre/post
  double omega = 0.7;
  int elems_per_block = 4;
  int overlap_layers = 1;
  int gmres_restart = 60, gmres_max_iters = 500;
  double gmres_rtol = 1e-8, gmres_atol = 1e-12;
  double newton_rtol = 1e-8, newton_atol = 1e-10;
  int newton_max = 15;
  int quad_points = 3;
  int frozen_geometry = 0;

  // outputs
  std::string out = "out";
  int vtk = 1;
  int dump_matrices = 0;
  long long seed = 0;

  // Fully-defaulted key/value view in deterministic order.
  std::vector<std::pair<std::string, std::string>> key_values() const;

  std::vector<std::string> smoother_list() const;
  GeometryCase geometry_case() const;
  MaterialParams material() const;
  KFunction k_function() const;
  std::vector<BoundaryCondition> boundary_conditions() const;
  SolverConfig solver_config(const std::string& smoother_name) const;
  TimeScheme time_scheme() const { return TimeScheme{1.0 / t_step}; }

  // Cross-field validation (pairings, positivity); throws ConfigError.
  void validate() const;
};

// key=value lines, '#' comments; unknown keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

void write_manifest(std::ostream& os, const RunConfig& cfg);
void write_manifest_file(const std::string& path, const RunConfig& cfg);

}  // namespace fsi
