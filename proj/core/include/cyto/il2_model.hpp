#pragma once

// IL-2 / IL-2 receptor reaction model.
//
// Units: um, hours, nM for the extracellular concentration u, molecules per
// cell for the receptor pools R (free), C (IL-2 bound complexes) and E
// (internalized complexes). One nM equals `alpha` = 0.6022 molecules/um^3.

#include <array>
#include <cstdint>
#include <vector>

namespace cyto {

/// (R, C, E) of one cell.
using Receptors = std::array<double, 3>;
inline constexpr int kR = 0;
inline constexpr int kC = 1;
inline constexpr int kE = 2;

/// Receptor count above which a cell is reported as activated.
inline constexpr double kActivationThreshold = 4000.0;

struct ModelParams {
  double mu = 36000.0;     // um^2/h
  double k_d = 0.1;        // 1/h
  double w0 = 150.0;       // molecules/cell/h
  double w1 = 3000.0;      // molecules/cell/h
  double K_half = 1000.0;  // molecules/cell
  double k_on = 111.6;     // 1/nM/h
  double k_off = 0.83;     // 1/h
  double k_iR = 0.64;      // 1/h
  double k_iC = 1.7;       // 1/h, also used where the model writes k_iB
  double k_rec = 9.0;      // 1/h
  double k_deg = 5.0;      // 1/h
  double alpha = 0.6022;   // molecules um^-3 nM^-1

  std::vector<double> q;  // secretion rate per cell, molecules/cell/h

  void validate() const;
  int num_cells() const { return static_cast<int>(q.size()); }
  /// R at the unstimulated fixed point (u = 0, C = E = 0).
  double rest_receptors() const { return w0 / k_iR; }
};

struct CellSpec {
  int index = 0;
  bool secreting = false;
  double q = 0.0;
};

std::vector<CellSpec> cell_specs(const ModelParams& params);

/// `count` distinct cells drawn uniformly without replacement, sorted.
std::vector<int> choose_secreting(int num_cells, int count, std::uint64_t seed);

/// Right-hand side of the receptor ODEs, d(R, C, E)/dt.
/// The solver works with B = -rhs so that  dv/dt + B(u_tilde, v) = 0.
Receptors ode_rhs(double u_tilde, const Receptors& v, const ModelParams& p);

struct RhsJacobian {
  std::array<Receptors, 3> dv;  // dv[a][b] = d rhs_a / d v_b
  Receptors du;                 // d rhs_a / d u_tilde
};

RhsJacobian ode_jacobian(double u_tilde, const Receptors& v, const ModelParams& p);

struct FluxValue {
  double value = 0.0;  // nM um / h
  double d_u = 0.0;
  double d_R = 0.0;
  double d_C = 0.0;
};

/// Flux density mu du/dn on a cell surface: (q - k_on R u + k_off C) / (alpha |Gamma|).
FluxValue boundary_flux(double u_point, const Receptors& v, double secretion, const ModelParams& p,
                        double gamma_area);

inline bool is_activated(const Receptors& v) { return v[kR] + v[kC] > kActivationThreshold; }

}  // namespace cyto
