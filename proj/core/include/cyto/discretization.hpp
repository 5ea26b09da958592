#pragma once

// Q1 finite elements for the extracellular field coupled to per-cell
// receptor ODEs, implicit Euler in time.
//
// Discrete residual (transient, step k):
//   PDE  M u + k mu K u + k k_d M u + k sum_i int_{Gamma_i} -phi_i psi - M u_prev
//   ODE  v + k B(u_tilde, v) - v_prev,          B = -ode_rhs
// Stationary: drop M u, M u_prev, v, v_prev and the factor k.
//
// Quadrature is 2x2x2 Gauss per element and 2x2 per boundary face, exact
// for products of Q1 functions on box elements, so the flux term
// int k_on R u psi reduces to (boundary mass matrix) * u.

#include <optional>
#include <span>
#include <vector>

#include "cyto/coupled.hpp"
#include "cyto/il2_model.hpp"
#include "cyto/mesh.hpp"
#include "cyto/sparse.hpp"

namespace cyto {

struct SystemState {
  int level = 0;
  std::vector<double> u;         // nM, one value per PDE dof of `level`
  std::vector<Receptors> v;      // molecules/cell

  Index n_pde() const { return static_cast<Index>(u.size()); }
  int num_cells() const { return static_cast<int>(v.size()); }

  PartitionedVector to_vector() const;
  /// this += scale * delta
  void add(const PartitionedVector& delta, double scale = 1.0);
};

/// Boundary integrals over one cell surface on one level.
struct CellSurface {
  double area = 0.0;
  std::vector<Index> dofs;          // sorted boundary dofs
  std::vector<double> load;         // int_{Gamma_i} psi_k, aligned with dofs
  // Boundary mass matrix int_{Gamma_i} psi_a psi_b as entries of the
  // level pattern.
  std::vector<Index> mass_row;      // index into dofs
  std::vector<Index> mass_col;      // global dof
  std::vector<std::size_t> mass_pos;  // position in LevelOperators::pattern
  std::vector<double> mass_value;
};

struct LevelOperators {
  int level = 0;
  double volume = 0.0;  // |Omega| from the mass matrix
  SparseMatrix pattern;  // 27-point vertex adjacency, zero values
  std::vector<double> mass;
  std::vector<double> stiffness;
  std::vector<CellSurface> surfaces;

  Index n_pde() const { return pattern.rows(); }
  SparseMatrix mass_matrix() const;
  SparseMatrix stiffness_matrix() const;
};

/// Mesh hierarchy plus every state-independent operator on it.
class Discretization {
 public:
  explicit Discretization(const MeshConfig& config);

  const MeshHierarchy& mesh() const { return mesh_; }
  int finest() const { return mesh_.finest(); }
  int num_cells() const { return mesh_.num_cells(); }
  Index n_pde(int level) const { return levels_.at(level).n_pde(); }
  Index n_ode() const { return 3 * num_cells(); }
  const LevelOperators& level(int l) const { return levels_.at(l); }

  /// Q1 interpolation from level l-1 to level l (l >= 1).
  const SparseMatrix& prolongation(int l) const { return prolongation_.at(l); }
  /// Transpose of prolongation(l).
  const SparseMatrix& restriction(int l) const { return restriction_.at(l); }

  /// Nodal injection onto a coarser level (coarse vertices are fine vertices).
  std::vector<double> interpolate_to_level(std::span<const double> u, int from, int to) const;

  double surface_average(std::span<const double> u, int cell, int level) const;
  std::vector<double> surface_averages(std::span<const double> u, int level) const;

  /// u = 0, R = w0/k_iR, C = E = 0.
  SystemState rest_state(int level, const ModelParams& params) const;

 private:
  MeshHierarchy mesh_;
  std::vector<LevelOperators> levels_;
  std::vector<SparseMatrix> prolongation_;
  std::vector<SparseMatrix> restriction_;
};

LevelOperators build_level_operators(const HexMesh& mesh, const DofMap& dofs);

/// Stationary problem when `dt` is empty, otherwise one implicit Euler step
/// of size *dt starting from `previous`.
struct Problem {
  ModelParams params;
  std::optional<double> dt;
  SystemState previous;

  bool stationary() const { return !dt.has_value(); }
  static Problem steady(ModelParams p) { return {std::move(p), std::nullopt, {}}; }
  static Problem step(ModelParams p, double k, SystemState prev) { return {std::move(p), k, std::move(prev)}; }
};

struct AssembledSystem {
  PartitionedVector residual;
  CoupledMatrix matrix;
};

PartitionedVector assemble_residual(const Discretization& disc, const Problem& problem, const SystemState& state);

/// Jacobian on `level` with the coupling data (u_tilde per cell, v) supplied
/// by the caller; u is the PDE field on that level.
CoupledMatrix assemble_jacobian(const Discretization& disc, int level, std::span<const double> u,
                                std::span<const double> u_tilde, std::span<const Receptors> v,
                                const Problem& problem);

AssembledSystem assemble(const Discretization& disc, const Problem& problem, const SystemState& state);

AssembledSystem assemble_transient(const Discretization& disc, const SystemState& state, const SystemState& prev,
                                   double k, const ModelParams& params);
AssembledSystem assemble_stationary(const Discretization& disc, const SystemState& state,
                                    const ModelParams& params);

/// Sum over cells of the boundary exchange int_{Gamma_i} phi_i ds (nM um^3/h).
double total_boundary_exchange(const Discretization& disc, const SystemState& state, const ModelParams& params);
/// int_Omega u dx (nM um^3).
double integrate_field(const Discretization& disc, const SystemState& state);

}  // namespace cyto
