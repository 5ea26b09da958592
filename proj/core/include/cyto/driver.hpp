#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cyto/config.hpp"
#include "cyto/discretization.hpp"
#include "cyto/nonlinear.hpp"
#include "cyto/sensitivity.hpp"

namespace cyto {

struct Trajectory {
  std::vector<double> times;                      // starts at 0
  std::vector<std::vector<Receptors>> receptors;  // [stamp][cell]
  std::vector<std::vector<double>> u_tilde;       // [stamp][cell]
  std::vector<SolveStats> stats;                  // [stamp], empty stats at t = 0
  SolveStats total;
  SystemState final_state;

  std::size_t size() const { return times.size(); }
};

/// Called after every completed time step (step >= 1) and once for t = 0.
using StepObserver = std::function<void(int step, double t, const SystemState& state)>;

/// Initial state on the finest level from the model section.
SystemState initial_state(const Discretization& disc, const RunConfig& config);

Trajectory run_transient(const Discretization& disc, const RunConfig& config, const StepObserver& observer = {});
Trajectory run_transient(const RunConfig& config);

struct StationaryResult {
  SystemState state;
  SolveStats stats;         // stationary Newton only
  SolveStats pseudo_stats;  // globalization time steps
  CouplingReport report;
};

StationaryResult run_stationary(const Discretization& disc, const RunConfig& config, bool with_report = true);
StationaryResult run_stationary(const RunConfig& config);

struct RunRecord {
  std::string scenario;
  Approach approach = Approach::Coupled;
  MgMode smoother = MgMode::CoupledS1;
  int level = 0;
  int num_cells = 0;
  double k_d = 0.0;
  double dt = 0.0;  // 0 for stationary runs
  int max_iter = 0;
  bool ok = false;
  std::string error;
  SolveStats stats;
};

/// Runs each configuration in turn; a failing run is recorded and the
/// campaign continues.
std::vector<RunRecord> run_comparison(std::span<const RunConfig> runs);

enum class TableKind { Smoother, Stationary, Transient, Scaling };
TableKind parse_table_kind(const std::string& s);
const char* to_string(TableKind kind) noexcept;

struct MatrixOptions {
  std::vector<int> levels{1, 2, 3};
  std::vector<double> dts{0.1, 0.01};
  std::vector<int> max_iters{1, 2, 3, 4};
  std::vector<int> cells_per_axis{2, 3};
};

/// Configurations whose records fill the given table layout.
std::vector<RunConfig> comparison_matrix(TableKind kind, const RunConfig& base, const MatrixOptions& options = {});

/// Table layouts (headers fixed):
///   smoother   level,smoother,log10_r,sum_s,newton_steps,status
///   stationary scenario,k_d,level,approach,n,s_bar,sum_s,status
///   transient  dt,approach,max_iter,sum_n,sum_s,status
///   scaling    num_cells,sum_n_c,sum_s_c,sum_n_d,sum_s_d,ratio
void write_table(std::ostream& os, TableKind kind, std::span<const RunRecord> records);

}  // namespace cyto
