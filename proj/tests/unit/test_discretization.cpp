#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cyto/discretization.hpp"
#include "cyto/error.hpp"
#include "oracles.hpp"

using namespace cyto;

namespace {

MeshConfig mesh(int n, int levels) {
  MeshConfig c;
  c.cells_per_axis = n;
  c.levels = levels;
  return c;
}

ModelParams params(int nc, double q_first = 2500.0) {
  ModelParams p;
  p.q.assign(static_cast<std::size_t>(nc), 0.0);
  p.q[0] = q_first;
  return p;
}

const Discretization& disc_n2_l1() {
  static const Discretization d(mesh(2, 1));
  return d;
}

const Discretization& disc_n2_l0() {
  static const Discretization d(mesh(2, 0));
  return d;
}

double sum(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

}  // namespace

TEST_CASE("mass matrix integrates to the domain volume") {
  const Discretization& d = disc_n2_l1();
  for (int l = 0; l <= 1; ++l) {
    CHECK(sum(d.level(l).mass) == doctest::Approx(d.mesh().config.domain_volume()).epsilon(1e-12));
    CHECK(d.level(l).volume == doctest::Approx(d.mesh().config.domain_volume()).epsilon(1e-12));
  }
}

TEST_CASE("stiffness matrix annihilates constants and is symmetric positive semidefinite") {
  const Discretization& d = disc_n2_l0();
  const SparseMatrix K = d.level(0).stiffness_matrix();
  const std::vector<double> ones(static_cast<std::size_t>(K.rows()), 1.0);
  std::vector<double> y(ones.size());
  K.multiply(ones, y);
  CHECK(norm_inf(y) < 1e-12 * K.rows());
  const Eigen::MatrixXd D = oracle::dense(K);
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  CHECK(std::abs(ev(0)) < 1e-10 * top);
  CHECK(ev(1) > 1e-8 * top);  // connected domain: one-dimensional kernel
}

TEST_CASE("surface averages of constant and linear fields") {
  const Discretization& d = disc_n2_l1();
  const auto& cfg = d.mesh().config;
  for (int l = 0; l <= 1; ++l) {
    const Index n = d.n_pde(l);
    std::vector<double> c(static_cast<std::size_t>(n), 3.5), x(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) x[i] = d.mesh().dof_point(l, i)[0];
    for (int cell = 0; cell < d.num_cells(); ++cell) {
      CHECK(d.surface_average(c, cell, l) == doctest::Approx(3.5).epsilon(1e-13));
      CHECK(d.surface_average(x, cell, l) == doctest::Approx(cfg.hole_center(cell)[0]).epsilon(1e-12));
      CHECK(d.level(l).surfaces[cell].area == doctest::Approx(cfg.hole_area()));
    }
  }
}

TEST_CASE("surface average of x^2 matches brute-force face quadrature") {
  // Midpoint sampling of the bilinear interpolant on every tagged face.
  const Discretization& d = disc_n2_l0();
  const HexMesh& m = d.mesh().mesh(0);
  const DofMap& dm = d.mesh().dof(0);
  std::vector<double> f(static_cast<std::size_t>(d.n_pde(0)));
  for (Index i = 0; i < d.n_pde(0); ++i) {
    const Point3 p = d.mesh().dof_point(0, i);
    f[i] = p[0] * p[0] + 0.5 * p[1] * p[2];
  }
  const int cell = 3;
  double integral = 0.0, area = 0.0;
  const int S = 40;
  for (const BoundaryFace& bf : m.boundary_faces) {
    if (bf.tag != cell) continue;
    const auto& fv = kFaceVertices[bf.local_face];
    std::array<double, 4> val;
    for (int k = 0; k < 4; ++k) {
      const Index vtx = m.elements[bf.element][fv[k]];
      val[k] = f[dm.vertex_to_dof[vtx]];
    }
    // Face corners are in tensor order: (0,0), (1,0), (0,1), (1,1).
    const double a = m.face_area(bf);
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < S; ++j) {
        const double s = (i + 0.5) / S, t = (j + 0.5) / S;
        integral += a / (S * S) * ((1 - s) * (1 - t) * val[0] + s * (1 - t) * val[1] + (1 - s) * t * val[2] + s * t * val[3]);
      }
    area += a;
  }
  CHECK(area == doctest::Approx(600.0));
  CHECK(d.surface_average(f, cell, 0) == doctest::Approx(integral / area).epsilon(1e-4));
}

TEST_CASE("residual at the zero state is the secretion load and the receptor source") {
  const Discretization& d = disc_n2_l0();
  const ModelParams p = params(8);
  SystemState zero;
  zero.level = 0;
  zero.u.assign(static_cast<std::size_t>(d.n_pde(0)), 0.0);
  zero.v.assign(8, Receptors{0, 0, 0});

  const auto rs = assemble_residual(d, Problem::steady(p), zero);
  CHECK(sum(rs.pde()) == doctest::Approx(-2500.0 / p.alpha).epsilon(1e-12));
  for (int c = 0; c < 8; ++c) {
    CHECK(rs.ode()[3 * c] == doctest::Approx(-p.w0));
    CHECK(rs.ode()[3 * c + 1] == 0.0);
  }
  const double k = 0.1;
  const auto rt = assemble_residual(d, Problem::step(p, k, zero), zero);
  CHECK(sum(rt.pde()) == doctest::Approx(-k * 2500.0 / p.alpha).epsilon(1e-12));
  for (int c = 0; c < 8; ++c) CHECK(rt.ode()[3 * c] == doctest::Approx(-k * p.w0));

  ModelParams p2 = params(8, 5000.0);
  const auto r2 = assemble_residual(d, Problem::steady(p2), zero);
  for (Index i = 0; i < d.n_pde(0); ++i) CHECK(r2.pde()[i] == doctest::Approx(2 * rs.pde()[i]));
}

TEST_CASE("rest state without secretion is an exact stationary solution") {
  const Discretization& d = disc_n2_l0();
  const ModelParams p = params(8, 0.0);
  const SystemState rest = d.rest_state(0, p);
  const auto r = assemble_residual(d, Problem::steady(p), rest);
  CHECK(norm_inf(r.all()) < 1e-12);
  const auto rt = assemble_residual(d, Problem::step(p, 0.1, rest), rest);
  CHECK(norm_inf(rt.all()) < 1e-12);
}

TEST_CASE("analytic Jacobian matches finite differences") {
  const Discretization& d = disc_n2_l0();
  const ModelParams p = params(8);
  std::mt19937_64 rng(17);
  const SystemState s = oracle::random_positive_state(d, 0, rng);
  SUBCASE("stationary") {
    const Problem pr = Problem::steady(p);
    const Eigen::MatrixXd J = oracle::dense(assemble(d, pr, s).matrix);
    CHECK(oracle::rel_error(J, oracle::fd_jacobian(d, pr, s)) < 1e-6);
  }
  SUBCASE("implicit Euler step") {
    SystemState prev = oracle::random_positive_state(d, 0, rng);
    const Problem pr = Problem::step(p, 0.1, prev);
    const Eigen::MatrixXd J = oracle::dense(assemble(d, pr, s).matrix);
    CHECK(oracle::rel_error(J, oracle::fd_jacobian(d, pr, s)) < 1e-6);
  }
}

TEST_CASE("coupling blocks only touch the surface of their own cell") {
  const Discretization& d = disc_n2_l1();
  const ModelParams p = params(8);
  std::mt19937_64 rng(3);
  const SystemState s = oracle::random_positive_state(d, 1, rng);
  const CoupledMatrix K = assemble(d, Problem::steady(p), s).matrix;
  CHECK_NOTHROW(K.validate());
  const auto& surf = d.level(1).surfaces;
  auto on_surface = [&](int cell, Index dof) {
    return std::binary_search(surf[cell].dofs.begin(), surf[cell].dofs.end(), dof);
  };
  for (Index r = 0; r < K.B_vu.rows(); ++r) {
    const int cell = r / 3;
    for (Index k = K.B_vu.row_ptr()[r]; k < K.B_vu.row_ptr()[r + 1]; ++k) CHECK(on_surface(cell, K.B_vu.col_idx()[k]));
  }
  for (Index r = 0; r < K.A_uv.rows(); ++r) {
    for (Index k = K.A_uv.row_ptr()[r]; k < K.A_uv.row_ptr()[r + 1]; ++k) {
      const Index col = K.A_uv.col_idx()[k];
      CHECK(col % 3 != kE);
      CHECK(on_surface(col / 3, r));
    }
  }
}

TEST_CASE("prolongation reproduces linear fields and injection inverts it on coarse dofs") {
  const Discretization& d = disc_n2_l1();
  const SparseMatrix& P = d.prolongation(1);
  CHECK(P.rows() == d.n_pde(1));
  CHECK(P.cols() == d.n_pde(0));
  auto linear = [&](int l) {
    std::vector<double> f(static_cast<std::size_t>(d.n_pde(l)));
    for (Index i = 0; i < d.n_pde(l); ++i) {
      const Point3 x = d.mesh().dof_point(l, i);
      f[i] = 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2];
    }
    return f;
  };
  const auto coarse = linear(0), fine = linear(1);
  std::vector<double> pf(fine.size());
  P.multiply(coarse, pf);
  CHECK(oracle::max_abs_diff(pf, fine) < 1e-11);
  CHECK(oracle::max_abs_diff(d.interpolate_to_level(fine, 1, 0), coarse) == 0.0);
  CHECK((oracle::dense(d.restriction(1)) - oracle::dense(P).transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension mismatches are rejected") {
  const Discretization& d = disc_n2_l0();
  const ModelParams p = params(8);
  SystemState s = d.rest_state(0, p);
  s.u.pop_back();
  CHECK_THROWS_AS(assemble_residual(d, Problem::steady(p), s), Error);
  const ModelParams short_q = params(3);
  CHECK_THROWS_AS(assemble_residual(d, Problem::steady(short_q), d.rest_state(0, p)), Error);
  CHECK_THROWS_AS(d.interpolate_to_level(std::vector<double>(5), 0, 0), Error);
  CHECK_THROWS_AS(assemble_residual(d, Problem::step(p, -1.0, d.rest_state(0, p)), d.rest_state(0, p)), Error);
}

TEST_CASE("boundary exchange balances decay at the stationary state") {
  // Constant test function: the stiffness term drops out for any state.
  const Discretization& d = disc_n2_l0();
  const ModelParams p = params(8);
  std::mt19937_64 rng(5);
  const SystemState s = oracle::random_positive_state(d, 0, rng);
  const auto r = assemble_residual(d, Problem::steady(p), s);
  double uptake = 0.0;
  const auto& surf = d.level(0).surfaces;
  for (int c = 0; c < 8; ++c) {
    double gu = 0.0;
    for (std::size_t n = 0; n < surf[c].mass_value.size(); ++n) gu += surf[c].mass_value[n] * s.u[surf[c].mass_col[n]];
    uptake += (p.k_on * s.v[c][kR] * gu - (p.q[c] + p.k_off * s.v[c][kC]) * surf[c].area) / (p.alpha * surf[c].area);
  }
  CHECK(sum(r.pde()) == doctest::Approx(p.k_d * integrate_field(d, s) + uptake).epsilon(1e-10));
}
