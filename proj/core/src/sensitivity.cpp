#include "cyto/sensitivity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "cyto/error.hpp"
#include "cyto/multigrid.hpp"

namespace cyto {

const char* to_string(CouplingClass c) noexcept {
  switch (c) {
    case CouplingClass::Weak: return "weak";
    case CouplingClass::Intermediate: return "intermediate";
    case CouplingClass::Strong: return "strong";
  }
  return "unknown";
}

CouplingClass classify_coupling(double lambda_max) noexcept {
  if (lambda_max > 1.0) return CouplingClass::Strong;
  if (lambda_max < 0.1) return CouplingClass::Weak;
  return CouplingClass::Intermediate;
}

namespace {

PdeSensitivities pde_columns(const Discretization& disc, const Multigrid& mg, const GmresOptions& gmres_options) {
  const CoupledMatrix& J = mg.level_matrix(mg.finest());
  const auto n = static_cast<std::size_t>(J.n_pde());
  const int nc = disc.num_cells();
  PdeSensitivities out;
  out.level = J.level;
  std::vector<double> e(static_cast<std::size_t>(J.n_ode())), rhs(n);
  for (int i = 0; i < nc; ++i) {
    for (int b = 0; b < 2; ++b) {
      std::fill(e.begin(), e.end(), 0.0);
      e[3 * i + b] = 1.0;
      J.A_uv.multiply(e, rhs);
      for (double& x : rhs) x = -x;
      std::vector<double> col(n, 0.0);
      if (norm2(rhs) > 0.0) {
        const GmresResult r = gmres([&](auto x, auto y) { J.A_uu.multiply(x, y); },
                                    [&](auto x, auto y) { mg.apply(x, y); }, rhs, col, gmres_options);
        if (!r.converged) {
          throw Error(ErrorKind::NotConverged, "sensitivity solve for cell " + std::to_string(i) + " did not converge");
        }
        out.gmres_iterations.push_back(r.iterations);
      } else {
        out.gmres_iterations.push_back(0);
      }
      out.columns.push_back(std::move(col));
    }
  }
  return out;
}

std::vector<CellOdeSensitivity> ode_rows(const Discretization& disc, const CoupledMatrix& J) {
  const LevelOperators& ops = disc.level(J.level);
  std::vector<CellOdeSensitivity> out;
  for (int i = 0; i < disc.num_cells(); ++i) {
    const CellSurface& s = ops.surfaces[i];
    Block3 inv;
    try {
      inv = invert3(J.B_vv[i]);
    } catch (const Error&) {
      throw Error(ErrorKind::SingularMatrix, "singular ODE Jacobian block in cell " + std::to_string(i));
    }
    CellOdeSensitivity cell{s.dofs, DenseMatrix(3, s.dofs.size())};
    for (std::size_t k = 0; k < s.dofs.size(); ++k) {
      double col[3];
      for (int a = 0; a < 3; ++a) col[a] = J.B_vu.at(3 * i + a, s.dofs[k]);
      for (int a = 0; a < 3; ++a) {
        cell.rows(a, k) = -(inv[3 * a] * col[0] + inv[3 * a + 1] * col[1] + inv[3 * a + 2] * col[2]);
      }
    }
    out.push_back(std::move(cell));
  }
  return out;
}

std::vector<CoupledMatrix> stationary_levels(const Discretization& disc, const SystemState& point,
                                             const ModelParams& params) {
  return build_level_matrices(disc, Problem::steady(params), point);
}

}  // namespace

PdeSensitivities pde_sensitivities(const Discretization& disc, const SystemState& point, const ModelParams& params,
                                   const GmresOptions& gmres) {
  const Multigrid mg(disc, stationary_levels(disc, point, params), {MgMode::PdeOnly, 3, 3});
  return pde_columns(disc, mg, gmres);
}

std::vector<CellOdeSensitivity> ode_sensitivities(const Discretization& disc, const SystemState& point,
                                                  const ModelParams& params) {
  const Problem problem = Problem::steady(params);
  const auto u_tilde = disc.surface_averages(point.u, point.level);
  return ode_rows(disc, assemble_jacobian(disc, point.level, point.u, u_tilde, point.v, problem));
}

DenseMatrix fixed_point_product(const PdeSensitivities& pde, const std::vector<CellOdeSensitivity>& ode) {
  const std::size_t nc = ode.size();
  if (pde.columns.size() != 2 * nc) throw Error(ErrorKind::DimensionMismatch, "sensitivity sets disagree on cells");
  DenseMatrix P(3 * nc, 3 * nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const CellOdeSensitivity& cell = ode[i];
    for (std::size_t j = 0; j < nc; ++j) {
      for (int b = 0; b < 2; ++b) {
        const std::vector<double>& col = pde.columns[2 * j + b];
        for (int a = 0; a < 3; ++a) {
          double s = 0.0;
          for (std::size_t k = 0; k < cell.dofs.size(); ++k) s += cell.rows(a, k) * col[cell.dofs[k]];
          P(3 * i + a, 3 * j + b) = s;
        }
      }
    }
  }
  return P;
}

double dense_spectral_radius(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "spectral radius of a non-square matrix");
  if (A.rows() == 0) return 0.0;
  Eigen::MatrixXd M(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) M(i, j) = A(i, j);
  const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NotConverged, "eigenvalue iteration failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CouplingReport coupling_strength(const Discretization& disc, const SystemState& point, const ModelParams& params,
                                 const GmresOptions& gmres) {
  const auto levels = stationary_levels(disc, point, params);
  const Multigrid mg(disc, levels, {MgMode::PdeOnly, 3, 3});
  const PdeSensitivities pde = pde_columns(disc, mg, gmres);
  const auto ode = ode_rows(disc, levels.back());
  const DenseMatrix P = fixed_point_product(pde, ode);

  CouplingReport rep;
  rep.level = point.level;
  rep.params = params;
  rep.point = "stationary solution, level " + std::to_string(point.level) + ", k_d = " + std::to_string(params.k_d);
  const int nc = disc.num_cells();
  double max_entry = 0.0, max_off = 0.0;
  for (int i = 0; i < nc; ++i) {
    const std::array<double, 4> m{P(3 * i, 3 * i), P(3 * i, 3 * i + 1), P(3 * i + 1, 3 * i), P(3 * i + 1, 3 * i + 1)};
    const double r = spectral_radius2x2(m[0], m[1], m[2], m[3]);
    rep.blocks.push_back(m);
    rep.radii.push_back(r);
    rep.lambda_max = std::max(rep.lambda_max, r);
  }
  for (std::size_t r = 0; r < P.rows(); ++r) {
    for (std::size_t c = 0; c < P.cols(); ++c) {
      const double x = std::abs(P(r, c));
      max_entry = std::max(max_entry, x);
      if (r / 3 != c / 3) max_off = std::max(max_off, x);
    }
  }
  rep.off_block_ratio = max_entry > 0.0 ? max_off / max_entry : 0.0;
  rep.full_product_radius = dense_spectral_radius(P);
  rep.classification = classify_coupling(rep.lambda_max);
  return rep;
}

void write_report_text(std::ostream& os, const CouplingReport& report) {
  os << "coupling strength at " << report.point << "\n"
     << "  k_d = " << report.params.k_d << ", k_on = " << report.params.k_on << ", k_off = " << report.params.k_off
     << ", mu = " << report.params.mu << "\n";
  for (std::size_t i = 0; i < report.blocks.size(); ++i) {
    const auto& m = report.blocks[i];
    os << "  cell " << i << ": [[" << m[0] << ", " << m[1] << "], [" << m[2] << ", " << m[3]
       << "]]  radius " << report.radii[i] << "\n";
  }
  os << "  lambda_max = " << report.lambda_max << " (" << to_string(report.classification) << ")\n"
     << "  full product radius = " << report.full_product_radius << ", off-block ratio = " << report.off_block_ratio
     << "\n";
}

void write_report_csv(std::ostream& os, const CouplingReport& report) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "cell,m_RR,m_RC,m_CR,m_CC,radius\n";
  for (std::size_t i = 0; i < report.blocks.size(); ++i) {
    const auto& m = report.blocks[i];
    os << i << ',' << m[0] << ',' << m[1] << ',' << m[2] << ',' << m[3] << ',' << report.radii[i] << '\n';
  }
  os.precision(old);
}

}  // namespace cyto
