#include "cyto/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cyto/error.hpp"

namespace cyto {

namespace {

constexpr double kGaussLo = 0.5 - 0.5 / 1.7320508075688772;
constexpr double kGaussHi = 0.5 + 0.5 / 1.7320508075688772;
constexpr std::array<double, 2> kGauss = {kGaussLo, kGaussHi};

// 1D linear shape functions on [0, 1].
double shape1(int bit, double t) { return bit ? t : 1.0 - t; }
double dshape1(int bit) { return bit ? 1.0 : -1.0; }

struct ElementMatrices {
  std::array<double, 64> mass{};
  std::array<double, 64> stiffness{};
};

ElementMatrices box_element(const Point3& size) {
  ElementMatrices em;
  const double jac = size[0] * size[1] * size[2];
  for (double z : kGauss) {
    for (double y : kGauss) {
      for (double x : kGauss) {
        const std::array<double, 3> xi = {x, y, z};
        std::array<double, 8> N{};
        std::array<std::array<double, 3>, 8> G{};
        for (int a = 0; a < 8; ++a) {
          const std::array<int, 3> bit = {a & 1, (a >> 1) & 1, (a >> 2) & 1};
          const std::array<double, 3> s = {shape1(bit[0], xi[0]), shape1(bit[1], xi[1]), shape1(bit[2], xi[2])};
          N[a] = s[0] * s[1] * s[2];
          G[a] = {dshape1(bit[0]) * s[1] * s[2] / size[0], s[0] * dshape1(bit[1]) * s[2] / size[1],
                  s[0] * s[1] * dshape1(bit[2]) / size[2]};
        }
        const double w = 0.125 * jac;  // Gauss weights on [0,1]^3 are 1/8 each
        for (int a = 0; a < 8; ++a) {
          for (int b = 0; b < 8; ++b) {
            em.mass[8 * a + b] += w * N[a] * N[b];
            em.stiffness[8 * a + b] += w * (G[a][0] * G[b][0] + G[a][1] * G[b][1] + G[a][2] * G[b][2]);
          }
        }
      }
    }
  }
  return em;
}

// Face mass and load for a rectangle with the face vertices in
// lexicographic order of the two in-plane axes.
struct FaceMatrices {
  std::array<double, 16> mass{};
  std::array<double, 4> load{};
};

FaceMatrices rectangle_face(double area) {
  FaceMatrices fm;
  for (double t : kGauss) {
    for (double s : kGauss) {
      std::array<double, 4> N{};
      for (int a = 0; a < 4; ++a) N[a] = shape1(a & 1, s) * shape1((a >> 1) & 1, t);
      const double w = 0.25 * area;
      for (int a = 0; a < 4; ++a) {
        fm.load[a] += w * N[a];
        for (int b = 0; b < 4; ++b) fm.mass[4 * a + b] += w * N[a] * N[b];
      }
    }
  }
  return fm;
}

Point3 element_size(const HexMesh& mesh, const std::array<Index, 8>& ev) {
  const Point3& p0 = mesh.vertices[ev[0]];
  const Point3& p7 = mesh.vertices[ev[7]];
  return {p7[0] - p0[0], p7[1] - p0[1], p7[2] - p0[2]};
}

struct Coefficients {
  double mass;       // multiplies M u
  double stiffness;  // multiplies K u
  double boundary;   // multiplies the surface terms and B
  double identity;   // multiplies v in the ODE rows
};

Coefficients coefficients(const Problem& p) {
  if (p.stationary()) return {p.params.k_d, p.params.mu, 1.0, 0.0};
  const double k = *p.dt;
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidConfig, "time step must be positive");
  return {1.0 + k * p.params.k_d, k * p.params.mu, k, 1.0};
}

void check_state(const Discretization& disc, const Problem& problem, const SystemState& state) {
  if (state.level < 0 || state.level > disc.finest() || state.n_pde() != disc.n_pde(state.level) ||
      state.num_cells() != disc.num_cells()) {
    throw Error(ErrorKind::DimensionMismatch, "state does not match the discretization level");
  }
  if (problem.params.num_cells() != disc.num_cells()) {
    throw Error(ErrorKind::DimensionMismatch, "secretion vector length differs from the number of cells");
  }
  if (!problem.stationary() &&
      (problem.previous.level != state.level || problem.previous.n_pde() != state.n_pde() ||
       problem.previous.num_cells() != state.num_cells())) {
    throw Error(ErrorKind::DimensionMismatch, "previous state is not on the level of the current state");
  }
}

// G_i u restricted to the boundary dofs of cell i.
std::vector<double> surface_mass_times(const CellSurface& s, std::span<const double> u) {
  std::vector<double> out(s.dofs.size(), 0.0);
  for (std::size_t n = 0; n < s.mass_value.size(); ++n) out[s.mass_row[n]] += s.mass_value[n] * u[s.mass_col[n]];
  return out;
}

}  // namespace

PartitionedVector SystemState::to_vector() const {
  PartitionedVector x(n_pde(), 3 * num_cells());
  std::copy(u.begin(), u.end(), x.pde().begin());
  auto ode = x.ode();
  for (std::size_t c = 0; c < v.size(); ++c)
    for (int a = 0; a < 3; ++a) ode[3 * c + a] = v[c][a];
  return x;
}

void SystemState::add(const PartitionedVector& delta, double scale) {
  if (delta.n_pde() != n_pde() || delta.n_ode() != 3 * num_cells()) {
    throw Error(ErrorKind::DimensionMismatch, "SystemState::add: size mismatch");
  }
  const auto du = delta.pde();
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += scale * du[i];
  const auto dv = delta.ode();
  for (std::size_t c = 0; c < v.size(); ++c)
    for (int a = 0; a < 3; ++a) v[c][a] += scale * dv[3 * c + a];
}

SparseMatrix LevelOperators::mass_matrix() const {
  SparseMatrix M = pattern;
  std::copy(mass.begin(), mass.end(), M.values().begin());
  return M;
}

SparseMatrix LevelOperators::stiffness_matrix() const {
  SparseMatrix K = pattern;
  std::copy(stiffness.begin(), stiffness.end(), K.values().begin());
  return K;
}

LevelOperators build_level_operators(const HexMesh& mesh, const DofMap& dofs) {
  LevelOperators ops;
  ops.level = mesh.level;
  const Index n = dofs.n_pde();

  std::vector<Triplet> triplets;
  triplets.reserve(mesh.num_elements() * 64);
  Point3 cached_size{-1.0, -1.0, -1.0};
  ElementMatrices em;
  for (const auto& ev : mesh.elements) {
    const Point3 size = element_size(mesh, ev);
    if (size != cached_size) {
      em = box_element(size);
      cached_size = size;
    }
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        triplets.push_back({dofs.vertex_to_dof[ev[a]], dofs.vertex_to_dof[ev[b]], em.mass[8 * a + b]});
  }
  const SparseMatrix M = SparseMatrix::from_triplets(n, n, std::move(triplets));
  ops.pattern = M.with_pattern_of(0.0);
  ops.mass.assign(M.values().begin(), M.values().end());
  ops.stiffness.assign(M.nnz(), 0.0);

  cached_size = {-1.0, -1.0, -1.0};
  for (const auto& ev : mesh.elements) {
    const Point3 size = element_size(mesh, ev);
    if (size != cached_size) {
      em = box_element(size);
      cached_size = size;
    }
    for (int a = 0; a < 8; ++a) {
      const Index row = dofs.vertex_to_dof[ev[a]];
      for (int b = 0; b < 8; ++b) {
        ops.stiffness[ops.pattern.find(row, dofs.vertex_to_dof[ev[b]])] += em.stiffness[8 * a + b];
      }
    }
  }
  ops.volume = 0.0;
  for (double m : ops.mass) ops.volume += m;

  ops.surfaces.resize(static_cast<std::size_t>(mesh.num_cells));
  std::vector<std::map<std::pair<Index, Index>, double>> face_mass(ops.surfaces.size());
  for (int c = 0; c < mesh.num_cells; ++c) {
    ops.surfaces[c].dofs = dofs.boundary_dofs[c];
    ops.surfaces[c].load.assign(ops.surfaces[c].dofs.size(), 0.0);
  }
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag == kOuterWall) continue;
    CellSurface& s = ops.surfaces[f.tag];
    const double area = mesh.face_area(f);
    s.area += area;
    const FaceMatrices fm = rectangle_face(area);
    const auto& ev = mesh.elements[f.element];
    const auto& fv = kFaceVertices[f.local_face];
    for (int a = 0; a < 4; ++a) {
      const Index da = dofs.vertex_to_dof[ev[fv[a]]];
      const auto it = std::lower_bound(s.dofs.begin(), s.dofs.end(), da);
      s.load[it - s.dofs.begin()] += fm.load[a];
      for (int b = 0; b < 4; ++b) face_mass[f.tag][{da, dofs.vertex_to_dof[ev[fv[b]]]}] += fm.mass[4 * a + b];
    }
  }
  for (std::size_t c = 0; c < ops.surfaces.size(); ++c) {
    CellSurface& s = ops.surfaces[c];
    for (const auto& [key, value] : face_mass[c]) {
      const auto it = std::lower_bound(s.dofs.begin(), s.dofs.end(), key.first);
      s.mass_row.push_back(static_cast<Index>(it - s.dofs.begin()));
      s.mass_col.push_back(key.second);
      s.mass_pos.push_back(static_cast<std::size_t>(ops.pattern.find(key.first, key.second)));
      s.mass_value.push_back(value);
    }
  }
  return ops;
}

Discretization::Discretization(const MeshConfig& config) : mesh_(build_hierarchy(config)) {
  for (int l = 0; l <= mesh_.finest(); ++l) levels_.push_back(build_level_operators(mesh_.mesh(l), mesh_.dof(l)));
  prolongation_.resize(levels_.size());
  restriction_.resize(levels_.size());
  for (int l = 1; l <= mesh_.finest(); ++l) {
    const HexMesh& fine = mesh_.mesh(l);
    const DofMap& fd = mesh_.dof(l);
    const DofMap& cd = mesh_.dof(l - 1);
    std::vector<Triplet> t;
    t.reserve(fine.num_vertices() * 2);
    for (std::size_t v = 0; v < fine.num_vertices(); ++v) {
      const auto& parents = fine.vertex_parents[v];
      const double w = 1.0 / static_cast<double>(parents.size());
      for (Index p : parents) t.push_back({fd.vertex_to_dof[v], cd.vertex_to_dof[p], w});
    }
    prolongation_[l] = SparseMatrix::from_triplets(fd.n_pde(), cd.n_pde(), std::move(t));
    restriction_[l] = prolongation_[l].transpose();
  }
}

std::vector<double> Discretization::interpolate_to_level(std::span<const double> u, int from, int to) const {
  if (to > from || to < 0 || from > finest()) {
    throw Error(ErrorKind::InvalidConfig, "interpolate_to_level: target level must not be finer than source");
  }
  if (static_cast<Index>(u.size()) != n_pde(from)) {
    throw Error(ErrorKind::DimensionMismatch, "interpolate_to_level: vector length does not match level");
  }
  std::vector<double> current(u.begin(), u.end());
  for (int l = from; l > to; --l) {
    const auto map = mesh_.coarse_to_fine(l - 1);
    std::vector<double> coarse(map.size());
    for (std::size_t d = 0; d < map.size(); ++d) coarse[d] = current[map[d]];
    current = std::move(coarse);
  }
  return current;
}

double Discretization::surface_average(std::span<const double> u, int cell, int level) const {
  const CellSurface& s = levels_.at(level).surfaces.at(cell);
  double sum = 0.0;
  for (std::size_t k = 0; k < s.dofs.size(); ++k) sum += s.load[k] * u[s.dofs[k]];
  return sum / s.area;
}

std::vector<double> Discretization::surface_averages(std::span<const double> u, int level) const {
  std::vector<double> avg(static_cast<std::size_t>(num_cells()));
  for (int c = 0; c < num_cells(); ++c) avg[c] = surface_average(u, c, level);
  return avg;
}

SystemState Discretization::rest_state(int level, const ModelParams& params) const {
  SystemState s;
  s.level = level;
  s.u.assign(static_cast<std::size_t>(n_pde(level)), 0.0);
  s.v.assign(static_cast<std::size_t>(num_cells()), Receptors{params.rest_receptors(), 0.0, 0.0});
  return s;
}

PartitionedVector assemble_residual(const Discretization& disc, const Problem& problem, const SystemState& state) {
  check_state(disc, problem, state);
  const ModelParams& p = problem.params;
  const Coefficients co = coefficients(problem);
  const LevelOperators& ops = disc.level(state.level);
  const Index n = ops.n_pde();
  PartitionedVector r(n, disc.n_ode());

  auto ru = r.pde();
  const auto rp = ops.pattern.row_ptr();
  const auto ci = ops.pattern.col_idx();
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index k = rp[i]; k < rp[i + 1]; ++k) {
      double m = co.mass * state.u[ci[k]];
      if (!problem.stationary()) m -= problem.previous.u[ci[k]];
      s += ops.mass[k] * m + co.stiffness * ops.stiffness[k] * state.u[ci[k]];
    }
    ru[i] = s;
  }

  auto rv = r.ode();
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellSurface& surf = ops.surfaces[c];
    const Receptors& vc = state.v[c];
    const double scale = 1.0 / (p.alpha * surf.area);
    const double uptake = co.boundary * p.k_on * vc[kR] * scale;
    const double source = co.boundary * (p.q[c] + p.k_off * vc[kC]) * scale;
    const auto Gu = surface_mass_times(surf, state.u);
    for (std::size_t k = 0; k < surf.dofs.size(); ++k) ru[surf.dofs[k]] += uptake * Gu[k] - source * surf.load[k];

    const double u_tilde = disc.surface_average(state.u, c, state.level);
    const Receptors rhs = ode_rhs(u_tilde, vc, p);
    for (int a = 0; a < 3; ++a) {
      double value = co.identity * vc[a] - co.boundary * rhs[a];
      if (!problem.stationary()) value -= problem.previous.v[c][a];
      rv[3 * c + a] = value;
    }
  }
  return r;
}

CoupledMatrix assemble_jacobian(const Discretization& disc, int level, std::span<const double> u,
                                std::span<const double> u_tilde, std::span<const Receptors> v,
                                const Problem& problem) {
  const ModelParams& p = problem.params;
  const Coefficients co = coefficients(problem);
  const LevelOperators& ops = disc.level(level);
  const Index n = ops.n_pde();
  const int nc = disc.num_cells();
  if (static_cast<Index>(u.size()) != n || static_cast<int>(u_tilde.size()) != nc || static_cast<int>(v.size()) != nc) {
    throw Error(ErrorKind::DimensionMismatch, "assemble_jacobian: inputs do not match the level");
  }

  CoupledMatrix K;
  K.level = level;
  K.A_uu = ops.pattern;
  auto a = K.A_uu.values();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = co.mass * ops.mass[k] + co.stiffness * ops.stiffness[k];

  std::vector<Triplet> uv, vu;
  K.B_vv.resize(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    const CellSurface& surf = ops.surfaces[c];
    const double scale = 1.0 / (p.alpha * surf.area);
    const double uptake = co.boundary * p.k_on * v[c][kR] * scale;
    for (std::size_t m = 0; m < surf.mass_value.size(); ++m) a[surf.mass_pos[m]] += uptake * surf.mass_value[m];

    const auto Gu = surface_mass_times(surf, u);
    const RhsJacobian J = ode_jacobian(u_tilde[c], v[c], p);
    const Index col_R = 3 * c + kR, col_C = 3 * c + kC;
    for (std::size_t k = 0; k < surf.dofs.size(); ++k) {
      const Index dof = surf.dofs[k];
      uv.push_back({dof, col_R, co.boundary * p.k_on * scale * Gu[k]});
      uv.push_back({dof, col_C, -co.boundary * p.k_off * scale * surf.load[k]});
      const double w = surf.load[k] / surf.area;
      vu.push_back({col_R, dof, -co.boundary * J.du[kR] * w});
      vu.push_back({col_C, dof, -co.boundary * J.du[kC] * w});
    }
    Block3& b = K.B_vv[c];
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) b[3 * r + s] = (r == s ? co.identity : 0.0) - co.boundary * J.dv[r][s];
  }
  K.A_uv = SparseMatrix::from_triplets(n, 3 * nc, std::move(uv));
  K.B_vu = SparseMatrix::from_triplets(3 * nc, n, std::move(vu));
  return K;
}

AssembledSystem assemble(const Discretization& disc, const Problem& problem, const SystemState& state) {
  AssembledSystem sys{assemble_residual(disc, problem, state), {}};
  const auto u_tilde = disc.surface_averages(state.u, state.level);
  sys.matrix = assemble_jacobian(disc, state.level, state.u, u_tilde, state.v, problem);
  return sys;
}

AssembledSystem assemble_transient(const Discretization& disc, const SystemState& state, const SystemState& prev,
                                   double k, const ModelParams& params) {
  return assemble(disc, Problem::step(params, k, prev), state);
}

AssembledSystem assemble_stationary(const Discretization& disc, const SystemState& state,
                                    const ModelParams& params) {
  return assemble(disc, Problem::steady(params), state);
}

double total_boundary_exchange(const Discretization& disc, const SystemState& state, const ModelParams& params) {
  const LevelOperators& ops = disc.level(state.level);
  double total = 0.0;
  for (int c = 0; c < disc.num_cells(); ++c) {
    const CellSurface& surf = ops.surfaces[c];
    double flux = 0.0;
    for (std::size_t k = 0; k < surf.dofs.size(); ++k) {
      const FluxValue f = boundary_flux(state.u[surf.dofs[k]], state.v[c], params.q[c], params, surf.area);
      flux += f.value * surf.load[k];
    }
    total += flux;
  }
  return total;
}

double integrate_field(const Discretization& disc, const SystemState& state) {
  const LevelOperators& ops = disc.level(state.level);
  const auto rp = ops.pattern.row_ptr();
  const auto ci = ops.pattern.col_idx();
  double total = 0.0;
  for (Index i = 0; i < ops.n_pde(); ++i)
    for (Index k = rp[i]; k < rp[i + 1]; ++k) total += ops.mass[k] * state.u[ci[k]];
  return total;
}

}  // namespace cyto
