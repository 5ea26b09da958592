#pragma once

// Geometric multigrid V-cycle for the coupled Jacobian.
//
// The PDE part is transferred by Q1 prolongation and its transpose; the ODE
// part is carried over unchanged, so every level solves for the same 3*N_c
// receptor unknowns. Level 0 is solved directly.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cyto/coupled.hpp"
#include "cyto/direct.hpp"
#include "cyto/discretization.hpp"
#include "cyto/ilu.hpp"

namespace cyto {

enum class MgMode {
  CoupledS1,  // ILU(0) of the whole level matrix
  CoupledS2,  // block Gauss-Seidel: ILU(0) of the PDE block, exact 3x3 ODE solves
  PdeOnly,    // scalar PDE multigrid on A_uu
};

const char* to_string(MgMode mode) noexcept;

struct MgOptions {
  MgMode mode = MgMode::CoupledS1;
  int pre_smooth = 3;
  int post_smooth = 3;
};

/// Level matrices of the coupled Jacobian, re-assembled on every mesh level
/// with u_tilde and v taken from the finest-level linearization point.
std::vector<CoupledMatrix> build_level_matrices(const Discretization& disc, const Problem& problem,
                                                const SystemState& fine_point);

class Multigrid {
 public:
  Multigrid(const Discretization& disc, std::vector<CoupledMatrix> levels, MgOptions options);
  Multigrid(const Discretization& disc, const Problem& problem, const SystemState& fine_point, MgOptions options);

  const MgOptions& options() const { return options_; }
  int finest() const { return static_cast<int>(levels_.size()) - 1; }
  /// Length of the vectors the cycle acts on at `level`.
  Index vector_size(int level) const;
  const CoupledMatrix& level_matrix(int level) const { return levels_.at(level); }

  /// One V-cycle from the finest level with zero initial guess; x = B^{-1} b.
  void apply(std::span<const double> b, std::span<double> x) const;
  void vcycle(int level, std::span<const double> b, std::span<double> x) const;

  void smooth(int level, std::span<double> x, std::span<const double> b, int steps) const;
  void residual(int level, std::span<const double> x, std::span<const double> b, std::span<double> r) const;

  /// Fine residual at `level` to level - 1.
  std::vector<double> restrict_to_coarse(int level, std::span<const double> fine) const;
  /// Coarse correction at level - 1 to `level`.
  std::vector<double> prolong_to_fine(int level, std::span<const double> coarse) const;

 private:
  struct Level;
  void setup();

  const Discretization* disc_;
  std::vector<CoupledMatrix> levels_;
  MgOptions options_;
  std::vector<std::shared_ptr<const Level>> data_;
};

}  // namespace cyto
