#pragma once

// File output: legacy VTK, CSV tables and the metadata record of a run
// directory. CSV numbers are written with max_digits10 so they parse back
// to the same doubles.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "cyto/config.hpp"
#include "cyto/driver.hpp"

namespace cyto {

/// Unstructured grid of the state's level; one point per PDE dof, point
/// scalar "il2_nM".
void export_vtk(const Discretization& disc, const SystemState& state, const std::filesystem::path& path);

/// One row per stamp:
///   t,newton_steps,krylov,sweeps,R_0,C_0,E_0,u_tilde_0,R_1,...
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Inverse of write_trajectory_csv for times, receptors, u_tilde and the
/// per-stamp step counts.
Trajectory read_trajectory_csv(std::istream& is);

/// step,residual_norm,krylov,sweeps,reduction_rate (row 0 is the initial residual)
void write_stats_csv(std::ostream& os, const SolveStats& stats);
/// dof,x,y,z,u
void write_field_csv(std::ostream& os, const Discretization& disc, const SystemState& state);
/// cell,R,C,E,u_tilde,activated
void write_cells_csv(std::ostream& os, const Discretization& disc, const SystemState& state);

void export_csv(const std::filesystem::path& path, const Trajectory& traj);
void export_csv(const std::filesystem::path& path, const SolveStats& stats);
void export_csv(const std::filesystem::path& path, const CouplingReport& report);

/// metadata.json: code version, command, seed, units, resolved config,
/// secreting cells and dof counts.
void write_metadata(const std::filesystem::path& dir, const RunConfig& config, const Discretization& disc,
                    std::string_view command);

/// Machine-readable failure record {"status": "error", "kind": ..., "message": ...}.
std::string error_record(std::string_view kind, std::string_view message);

const char* code_version() noexcept;

}  // namespace cyto
