#pragma once

// Coupling strength of the stationary problem.
//
// With S: v -> u (PDE solve at fixed receptors) and T: u -> v (ODE
// stationarity at fixed u), the fixed-point map v -> T(S(v)) has Jacobian
// (dT/du)(dS/dv). Only the surface values of u on Gamma_i enter T_i, and
// only R_i, C_i enter the PDE, so the per-cell blocks are
//   M_i[a][b] = sum_{k in Gamma_i} dv_{i,a}/du_k * du_k/dv_{i,b},  a, b in {R, C}.
// For matrices X (m x n) and Y (n x m) the nonzero eigenvalues of XY and YX
// coincide, so these small products carry the spectrum of either ordering.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyto/dense.hpp"
#include "cyto/discretization.hpp"
#include "cyto/krylov.hpp"

namespace cyto {

/// du/dR_i and du/dC_i on the PDE dofs, columns[2 * i + b] with b = 0 (R), 1 (C).
struct PdeSensitivities {
  int level = 0;
  std::vector<std::vector<double>> columns;
  std::vector<int> gmres_iterations;
};

/// dv_i/du restricted to the boundary dofs of cell i: 3 x |dofs| values.
struct CellOdeSensitivity {
  std::vector<Index> dofs;
  DenseMatrix rows;
};

enum class CouplingClass { Weak, Intermediate, Strong };
const char* to_string(CouplingClass c) noexcept;
CouplingClass classify_coupling(double lambda_max) noexcept;

struct CouplingReport {
  std::string point;  // description of the linearization point
  int level = 0;
  ModelParams params;
  std::vector<std::array<double, 4>> blocks;  // row-major (R, C) x (R, C) per cell
  std::vector<double> radii;
  double lambda_max = 0.0;
  CouplingClass classification = CouplingClass::Weak;
  /// Spectral radius of the whole 3N_c x 3N_c product, cross-cell terms included.
  double full_product_radius = 0.0;
  /// max |off-block entry| / max |entry| of the whole product.
  double off_block_ratio = 0.0;
};

/// Linearization point should be a stationary solution.
PdeSensitivities pde_sensitivities(const Discretization& disc, const SystemState& point, const ModelParams& params,
                                   const GmresOptions& gmres = {});

std::vector<CellOdeSensitivity> ode_sensitivities(const Discretization& disc, const SystemState& point,
                                                  const ModelParams& params);

/// Full (dT/du)(dS/dv) as a dense 3N_c x 3N_c matrix; E columns are zero.
DenseMatrix fixed_point_product(const PdeSensitivities& pde, const std::vector<CellOdeSensitivity>& ode);

CouplingReport coupling_strength(const Discretization& disc, const SystemState& point, const ModelParams& params,
                                 const GmresOptions& gmres = {});

/// Largest eigenvalue modulus of a small dense matrix.
double dense_spectral_radius(const DenseMatrix& A);

void write_report_text(std::ostream& os, const CouplingReport& report);
/// Header: cell,m_RR,m_RC,m_CR,m_CC,radius
void write_report_csv(std::ostream& os, const CouplingReport& report);

}  // namespace cyto
