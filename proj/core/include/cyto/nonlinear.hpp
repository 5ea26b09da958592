#pragma once

#include <span>
#include <vector>

#include "cyto/discretization.hpp"
#include "cyto/multigrid.hpp"

namespace cyto {

enum class Approach { Coupled, Decoupled };
const char* to_string(Approach a) noexcept;

struct NewtonConfig {
  double tol_newton = 1e-6;  // on the Euclidean norm of the full residual
  double tol_iter = 1e-11;   // GMRES and fixed-point tolerance, relative
  int max_iter_fixedpoint = 0;  // decoupled sweeps per Newton step; 0 = unbounded
  int max_newton = 50;
  bool jacobian_reuse = false;
  int max_gmres = 500;
  int max_sweeps = 5000;  // hard cap when max_iter_fixedpoint is unbounded
  MgMode smoother = MgMode::CoupledS1;
  int smoothing_steps = 3;

  void validate() const;
};

struct SolveStats {
  int newton_steps = 0;
  long krylov_total = 0;
  long sweeps_total = 0;                // decoupled only
  std::vector<double> residual_norms;   // before step 1, after step 1, ...
  std::vector<int> krylov_per_step;
  std::vector<int> sweeps_per_step;
  std::vector<double> reduction_rates;  // average GMRES reduction per iteration
  std::vector<std::vector<double>> sweep_residuals;  // decoupled: res_iter after each sweep
  bool stagnated = false;
  double wall_seconds = 0.0;

  double krylov_avg() const {
    return newton_steps == 0 ? 0.0 : static_cast<double>(krylov_total) / newton_steps;
  }
  double mean_log10_rate() const;
  /// Accumulates counts of another solve (time stepping totals).
  void merge(const SolveStats& other);
};

struct SolveResult {
  SystemState state;
  SolveStats stats;
};

/// Newton's method on the full block system, GMRES with the coupled
/// multigrid V-cycle as right preconditioner.
SolveResult newton_coupled(const Discretization& disc, const Problem& problem, SystemState initial,
                           const NewtonConfig& config);

/// Newton's method whose linear systems are solved by the block Gauss-Seidel
/// fixed point "ODE (exact 3x3 solves) then PDE (GMRES + PDE multigrid)",
/// stopped when the full linear residual drops by tol_iter or after
/// max_iter_fixedpoint sweeps.
SolveResult newton_decoupled(const Discretization& disc, const Problem& problem, SystemState initial,
                             const NewtonConfig& config);

SolveResult solve(Approach approach, const Discretization& disc, const Problem& problem, SystemState initial,
                  const NewtonConfig& config);

/// Implicit Euler steps of the given sizes (coupled Newton) from `initial`;
/// yields a starting point for the stationary Newton iteration.
SystemState pseudo_timestep_globalize(const Discretization& disc, const ModelParams& params, SystemState initial,
                                      const NewtonConfig& config, std::span<const double> dt_sequence,
                                      SolveStats* stats = nullptr);

}  // namespace cyto
