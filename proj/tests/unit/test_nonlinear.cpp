#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "cyto/error.hpp"
#include "cyto/nonlinear.hpp"
#include "oracles.hpp"

using namespace cyto;

namespace {

const Discretization& disc(int n, int levels) {
  static std::map<std::pair<int, int>, std::unique_ptr<Discretization>> cache;
  auto& slot = cache[{n, levels}];
  if (!slot) {
    MeshConfig c;
    c.cells_per_axis = n;
    c.levels = levels;
    slot = std::make_unique<Discretization>(c);
  }
  return *slot;
}

ModelParams params(int nc, double q = 2500.0) {
  ModelParams p;
  p.q.assign(static_cast<std::size_t>(nc), 0.0);
  p.q[0] = q;
  return p;
}

void check_bookkeeping(const SolveStats& s) {
  CHECK(s.residual_norms.size() == static_cast<std::size_t>(s.newton_steps) + 1);
  CHECK(s.krylov_per_step.size() == static_cast<std::size_t>(s.newton_steps));
  CHECK(s.krylov_total == std::accumulate(s.krylov_per_step.begin(), s.krylov_per_step.end(), 0L));
  CHECK(s.sweeps_total == std::accumulate(s.sweeps_per_step.begin(), s.sweeps_per_step.end(), 0L));
}

}  // namespace

TEST_CASE("an exact solution needs no Newton step") {
  const Discretization& d = disc(2, 0);
  const ModelParams p = params(8, 0.0);
  for (Approach a : {Approach::Coupled, Approach::Decoupled}) {
    const SolveResult r = solve(a, d, Problem::steady(p), d.rest_state(0, p), {});
    CHECK(r.stats.newton_steps == 0);
    CHECK(r.stats.krylov_total == 0);
  }
}

TEST_CASE("a linear problem is solved by one Newton step") {
  const Discretization& d = disc(2, 0);
  ModelParams p = params(8);
  p.k_on = 0.0;
  p.w1 = 0.0;
  for (Approach a : {Approach::Coupled, Approach::Decoupled}) {
    const SolveResult r = solve(a, d, Problem::steady(p), d.rest_state(0, p), {});
    CHECK(r.stats.newton_steps == 1);
    check_bookkeeping(r.stats);
  }
}

TEST_CASE("without receptor binding the fixed point converges in one sweep") {
  const Discretization& d = disc(2, 0);
  ModelParams p = params(8);
  p.k_on = 0.0;
  p.k_off = 0.0;
  const SolveResult r = newton_decoupled(d, Problem::steady(p), d.rest_state(0, p), {});
  REQUIRE(r.stats.newton_steps >= 1);
  for (int s : r.stats.sweeps_per_step) CHECK(s == 1);
}

TEST_CASE("coupled and decoupled Newton reach the same stationary state") {
  const Discretization& d = disc(2, 0);
  const ModelParams p = params(8);
  NewtonConfig cfg;
  cfg.tol_newton = 1e-9;
  const SolveResult c = newton_coupled(d, Problem::steady(p), d.rest_state(0, p), cfg);
  const SolveResult u = newton_decoupled(d, Problem::steady(p), d.rest_state(0, p), cfg);
  check_bookkeeping(c.stats);
  check_bookkeeping(u.stats);
  const auto xc = c.state.to_vector(), xu = u.state.to_vector();
  CHECK(oracle::max_abs_diff(xc.pde(), xu.pde()) <= 1e-8 * norm_inf(xc.pde()));
  CHECK(oracle::max_abs_diff(xc.ode(), xu.ode()) <= 1e-8 * norm_inf(xc.ode()));
  CHECK(u.stats.newton_steps == c.stats.newton_steps);
  // The fixed point costs many more PDE solves than the coupled Krylov method.
  CHECK(u.stats.krylov_total >= 5 * c.stats.krylov_total);
  CHECK(u.stats.sweeps_total > u.stats.newton_steps);
}

TEST_CASE("fixed-point contraction matches the block Gauss-Seidel spectral radius") {
  const Discretization& d = disc(2, 0);
  const ModelParams p = params(8);
  const Problem pr = Problem::steady(p);
  const SolveResult u = newton_decoupled(d, pr, d.rest_state(0, p), {});
  REQUIRE(!u.stats.sweep_residuals.empty());
  const auto& h = u.stats.sweep_residuals.front();
  REQUIRE(h.size() >= 12);
  const double rate = std::pow(h[h.size() - 1] / h[h.size() - 6], 1.0 / 5.0);

  // Iteration matrix of the sweep at the first linearization point.
  const CoupledMatrix K = assemble(d, pr, d.rest_state(0, p)).matrix;
  const Eigen::MatrixXd D = oracle::dense(K);
  const auto np = K.n_pde(), no = K.n_ode();
  const Eigen::MatrixXd G = D.bottomRightCorner(no, no).lu().solve(
      D.bottomLeftCorner(no, np) * D.topLeftCorner(np, np).lu().solve(D.topRightCorner(np, no)));
  const double radius = G.eigenvalues().cwiseAbs().maxCoeff();
  MESSAGE("sweep rate " << rate << ", spectral radius " << radius);
  CHECK(rate >= radius / 2);
  CHECK(rate <= radius * 2);
}

TEST_CASE("coupled Newton converges quadratically near the solution") {
  const Discretization& d = disc(2, 0);
  ModelParams p = params(8);
  NewtonConfig cfg;
  cfg.tol_newton = 1e-8;
  const SolveResult c = newton_coupled(d, Problem::steady(p), d.rest_state(0, p), cfg);
  const auto& r = c.stats.residual_norms;
  REQUIRE(r.size() >= 5);
  // Last steps above the round-off floor: the contraction factor itself
  // shrinks by more than an order of magnitude, and r_{k+1} <= r_k^2.
  const std::size_t n = r.size() - 2;
  const double f1 = r[n - 1] / r[n - 2], f2 = r[n] / r[n - 1];
  MESSAGE("residuals " << r[n - 2] << " " << r[n - 1] << " " << r[n]);
  CHECK(f2 <= 0.1 * f1);
  CHECK(r[n] <= r[n - 1] * r[n - 1]);
  CHECK(r.back() < r[n]);
}

TEST_CASE("coupled Newton step count does not grow under refinement") {
  const ModelParams p = params(8);
  const SolveResult r1 = newton_coupled(disc(2, 1), Problem::steady(p), disc(2, 1).rest_state(1, p), {});
  const SolveResult r2 = newton_coupled(disc(2, 2), Problem::steady(p), disc(2, 2).rest_state(2, p), {});
  CHECK(r1.stats.newton_steps == r2.stats.newton_steps);
  CHECK(r2.stats.krylov_avg() <= r1.stats.krylov_avg() + 2);
}

TEST_CASE("pseudo time stepping") {
  const Discretization& d = disc(2, 0);
  const ModelParams p = params(8);
  const SystemState rest = d.rest_state(0, p);
  SolveStats s;
  const SystemState same = pseudo_timestep_globalize(d, p, rest, {}, {}, &s);
  CHECK(same.u == rest.u);
  CHECK(s.newton_steps == 0);

  const std::vector<double> dts(20, 0.5);
  const SystemState warm = pseudo_timestep_globalize(d, p, rest, {}, dts, &s);
  CHECK(s.newton_steps >= 20);
  const SolveResult cold = newton_coupled(d, Problem::steady(p), rest, {});
  const SolveResult hot = newton_coupled(d, Problem::steady(p), warm, {});
  CHECK(hot.stats.newton_steps <= cold.stats.newton_steps);
  CHECK(oracle::max_abs_diff(hot.state.u, cold.state.u) <= 1e-8 * norm_inf(cold.state.u));
}

TEST_CASE("iteration caps raise NotConverged") {
  const Discretization& d = disc(2, 0);
  const ModelParams p = params(8);
  NewtonConfig cfg;
  cfg.max_newton = 1;
  for (Approach a : {Approach::Coupled, Approach::Decoupled}) {
    try {
      solve(a, d, Problem::steady(p), d.rest_state(0, p), cfg);
      FAIL("expected NotConverged");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotConverged);
    }
  }
  cfg = {};
  cfg.max_gmres = 1;
  const Discretization& fine = disc(2, 1);
  CHECK_THROWS_AS(newton_coupled(fine, Problem::steady(p), fine.rest_state(1, p), cfg), Error);
}

TEST_CASE("sweep cap and statistics merge") {
  const Discretization& d = disc(2, 0);
  const ModelParams p = params(8);
  const SystemState rest = d.rest_state(0, p);
  NewtonConfig cfg;
  cfg.max_iter_fixedpoint = 2;
  const SolveResult r = newton_decoupled(d, Problem::step(p, 0.1, rest), rest, cfg);
  for (int s : r.stats.sweeps_per_step) CHECK(s <= 2);
  check_bookkeeping(r.stats);

  SolveStats total;
  total.merge(r.stats);
  total.merge(r.stats);
  CHECK(total.newton_steps == 2 * r.stats.newton_steps);
  CHECK(total.krylov_total == 2 * r.stats.krylov_total);
  CHECK(total.sweeps_total == 2 * r.stats.sweeps_total);
  CHECK(total.sweep_residuals.size() == 2 * r.stats.sweep_residuals.size());
}

TEST_CASE("solver configuration validation") {
  NewtonConfig c;
  CHECK_NOTHROW(c.validate());
  c.tol_iter = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.max_newton = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.smoother = MgMode::PdeOnly;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(std::string(to_string(Approach::Decoupled)) == "decoupled");
}
