#pragma once

// Run configuration in a sectioned key = value format:
//
//   [mesh]    cells_per_axis cell_side gap levels
//   [model]   scenario mu k_d w0 w1 K_half k_on k_off k_iR k_iC k_rec k_deg alpha
//             q_secreting secreting_count secreting_fraction seed
//             initial_u initial_R initial_C initial_E
//   [solver]  approach smoother tol_newton tol_iter max_iter_fixedpoint max_newton
//             jacobian_reuse max_gmres max_sweeps smoothing_steps
//   [time]    stationary dt t_final pseudo_dt
//   [output]  directory formats vtk_every
//
// '#' and ';' start comments. Lists are comma separated. Unknown sections or
// keys are errors.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cyto/il2_model.hpp"
#include "cyto/mesh.hpp"
#include "cyto/nonlinear.hpp"

namespace cyto {

struct ScenarioConfig {
  std::string scenario = "biological";
  ModelParams params;  // q is filled by resolve()
  double q_secreting = 2500.0;
  int secreting_count = 1;          // < 0: use secreting_fraction
  double secreting_fraction = 0.125;
  std::uint64_t seed = 1;
  double initial_u = 0.0;
  std::optional<double> initial_R;  // default w0 / k_iR
  double initial_C = 0.0;
  double initial_E = 0.0;
};

struct TimeConfig {
  bool stationary = false;
  double dt = 0.1;       // h
  double t_final = 20.0; // h
  std::vector<double> pseudo_dt;  // stationary only: globalization steps
};

struct OutputConfig {
  std::filesystem::path directory = "cyto_out";
  bool csv = true;
  bool vtk = false;
  int vtk_every = 0;  // transient: every n-th step, 0 = final state only
};

struct RunConfig {
  MeshConfig mesh;
  ScenarioConfig model;
  NewtonConfig solver;
  Approach approach = Approach::Coupled;
  TimeConfig time;
  OutputConfig output;

  void validate() const;
  int num_steps() const;
  std::vector<int> secreting_cells() const;
  /// Model parameters with per-cell secretion rates filled in.
  ModelParams resolved_params() const;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);
/// Writes every key in the format accepted by parse_run_config.
void write_run_config(std::ostream& out, const RunConfig& config);

Approach parse_approach(const std::string& s);
MgMode parse_smoother(const std::string& s);

}  // namespace cyto
