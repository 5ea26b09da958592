#include "cyto/multigrid.hpp"

#include <cmath>

#include "cyto/dense.hpp"
#include "cyto/error.hpp"

namespace cyto {

const char* to_string(MgMode mode) noexcept {
  switch (mode) {
    case MgMode::CoupledS1: return "s1";
    case MgMode::CoupledS2: return "s2";
    case MgMode::PdeOnly: return "pde_only";
  }
  return "unknown";
}

struct Multigrid::Level {
  SparseMatrix op;  // flattened coupled matrix, or A_uu in PdeOnly mode
  std::optional<Ilu0> ilu;
  std::optional<SparseDirectSolver> direct;
  std::vector<Block3> ode_inverse;  // S2 only
};

std::vector<CoupledMatrix> build_level_matrices(const Discretization& disc, const Problem& problem,
                                                const SystemState& fine_point) {
  const int finest = fine_point.level;
  const auto u_tilde = disc.surface_averages(fine_point.u, finest);
  std::vector<CoupledMatrix> levels(static_cast<std::size_t>(finest) + 1);
  for (int l = finest; l >= 0; --l) {
    const auto u_l = disc.interpolate_to_level(fine_point.u, finest, l);
    levels[l] = assemble_jacobian(disc, l, u_l, u_tilde, fine_point.v, problem);
  }
  return levels;
}

Multigrid::Multigrid(const Discretization& disc, std::vector<CoupledMatrix> levels, MgOptions options)
    : disc_(&disc), levels_(std::move(levels)), options_(options) {
  setup();
}

Multigrid::Multigrid(const Discretization& disc, const Problem& problem, const SystemState& fine_point,
                     MgOptions options)
    : Multigrid(disc, build_level_matrices(disc, problem, fine_point), options) {}

void Multigrid::setup() {
  if (levels_.empty()) throw Error(ErrorKind::InvalidConfig, "Multigrid: no levels");
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l].n_pde() != disc_->n_pde(static_cast<int>(l)) || levels_[l].n_ode() != levels_[0].n_ode()) {
      throw Error(ErrorKind::DimensionMismatch, "Multigrid: level matrix does not match the mesh hierarchy");
    }
  }
  data_.clear();
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    auto level = std::make_shared<Level>();
    const CoupledMatrix& K = levels_[l];
    level->op = options_.mode == MgMode::PdeOnly ? K.A_uu : K.flatten();
    if (l == 0) {
      level->direct.emplace(level->op);
    } else if (options_.mode == MgMode::CoupledS1) {
      level->ilu.emplace(level->op);
    } else {
      level->ilu.emplace(K.A_uu);
    }
    if (options_.mode == MgMode::CoupledS2) {
      for (const Block3& b : K.B_vv) level->ode_inverse.push_back(invert3(b));
    }
    data_.push_back(std::move(level));
  }
}

Index Multigrid::vector_size(int level) const {
  const CoupledMatrix& K = levels_.at(level);
  return options_.mode == MgMode::PdeOnly ? K.n_pde() : K.size();
}

void Multigrid::residual(int level, std::span<const double> x, std::span<const double> b, std::span<double> r) const {
  data_[level]->op.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

void Multigrid::smooth(int level, std::span<double> x, std::span<const double> b, int steps) const {
  const Level& L = *data_.at(level);
  if (level == 0) {
    L.direct->solve(b, x);
    return;
  }
  const auto n = static_cast<std::size_t>(vector_size(level));
  std::vector<double> r(n);
  if (options_.mode != MgMode::CoupledS2) {
    for (int s = 0; s < steps; ++s) {
      residual(level, x, b, r);
      L.ilu->solve(r, r);
      for (std::size_t i = 0; i < n; ++i) x[i] += r[i];
    }
  } else {
    const CoupledMatrix& K = levels_[level];
    const auto np = static_cast<std::size_t>(K.n_pde());
    auto xu = x.subspan(0, np), xv = x.subspan(np);
    const auto bu = b.subspan(0, np), bv = b.subspan(np);
    std::vector<double> ru(np), rv(xv.size());
    for (int s = 0; s < steps; ++s) {
      K.A_uu.multiply(xu, ru);
      K.A_uv.multiply_add(xv, ru);
      for (std::size_t i = 0; i < np; ++i) ru[i] = bu[i] - ru[i];
      L.ilu->solve(ru, ru);
      for (std::size_t i = 0; i < np; ++i) xu[i] += ru[i];

      K.B_vu.multiply(xu, rv);
      for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = bv[i] - rv[i];
      for (std::size_t c = 0; c < L.ode_inverse.size(); ++c) {
        const Block3& inv = L.ode_inverse[c];
        const double* g = &rv[3 * c];
        for (int a = 0; a < 3; ++a) xv[3 * c + a] = inv[3 * a] * g[0] + inv[3 * a + 1] * g[1] + inv[3 * a + 2] * g[2];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) throw Error(ErrorKind::NonFinite, "Multigrid: non-finite smoother iterate");
  }
}

std::vector<double> Multigrid::restrict_to_coarse(int level, std::span<const double> fine) const {
  if (level < 1 || level > finest()) throw Error(ErrorKind::InvalidConfig, "restrict: level out of range");
  const SparseMatrix& R = disc_->restriction(level);
  const auto np_fine = static_cast<std::size_t>(R.cols());
  const auto np_coarse = static_cast<std::size_t>(R.rows());
  const std::size_t n_ode = options_.mode == MgMode::PdeOnly ? 0 : fine.size() - np_fine;
  std::vector<double> coarse(np_coarse + n_ode);
  R.multiply(fine.subspan(0, np_fine), std::span<double>(coarse).subspan(0, np_coarse));
  std::copy(fine.begin() + static_cast<std::ptrdiff_t>(np_fine), fine.end(), coarse.begin() + static_cast<std::ptrdiff_t>(np_coarse));
  return coarse;
}

std::vector<double> Multigrid::prolong_to_fine(int level, std::span<const double> coarse) const {
  if (level < 1 || level > finest()) throw Error(ErrorKind::InvalidConfig, "prolong: level out of range");
  const SparseMatrix& P = disc_->prolongation(level);
  const auto np_fine = static_cast<std::size_t>(P.rows());
  const auto np_coarse = static_cast<std::size_t>(P.cols());
  const std::size_t n_ode = options_.mode == MgMode::PdeOnly ? 0 : coarse.size() - np_coarse;
  std::vector<double> fine(np_fine + n_ode);
  P.multiply(coarse.subspan(0, np_coarse), std::span<double>(fine).subspan(0, np_fine));
  std::copy(coarse.begin() + static_cast<std::ptrdiff_t>(np_coarse), coarse.end(), fine.begin() + static_cast<std::ptrdiff_t>(np_fine));
  return fine;
}

void Multigrid::vcycle(int level, std::span<const double> b, std::span<double> x) const {
  std::fill(x.begin(), x.end(), 0.0);
  if (level == 0) {
    data_[0]->direct->solve(b, x);
    return;
  }
  smooth(level, x, b, options_.pre_smooth);
  std::vector<double> r(x.size());
  residual(level, x, b, r);
  const auto rc = restrict_to_coarse(level, r);
  std::vector<double> ec(rc.size());
  vcycle(level - 1, rc, ec);
  const auto ef = prolong_to_fine(level, ec);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += ef[i];
  smooth(level, x, b, options_.post_smooth);
}

void Multigrid::apply(std::span<const double> b, std::span<double> x) const { vcycle(finest(), b, x); }

}  // namespace cyto
