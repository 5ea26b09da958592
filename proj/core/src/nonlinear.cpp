#include "cyto/nonlinear.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "cyto/dense.hpp"
#include "cyto/error.hpp"
#include "cyto/krylov.hpp"

namespace cyto {

const char* to_string(Approach a) noexcept { return a == Approach::Coupled ? "coupled" : "decoupled"; }

void NewtonConfig::validate() const {
  if (!(tol_newton > 0.0) || !(tol_iter > 0.0)) throw Error(ErrorKind::InvalidConfig, "solver tolerances must be positive");
  if (max_newton < 1 || max_gmres < 1 || max_sweeps < 1 || max_iter_fixedpoint < 0 || smoothing_steps < 0) {
    throw Error(ErrorKind::InvalidConfig, "solver iteration caps must be >= 1");
  }
  if (smoother == MgMode::PdeOnly) throw Error(ErrorKind::InvalidConfig, "coupled smoother must be s1 or s2");
}

double SolveStats::mean_log10_rate() const {
  if (reduction_rates.empty()) return 0.0;
  double s = 0.0;
  for (double r : reduction_rates) s += std::log10(r);
  return s / static_cast<double>(reduction_rates.size());
}

void SolveStats::merge(const SolveStats& other) {
  newton_steps += other.newton_steps;
  krylov_total += other.krylov_total;
  sweeps_total += other.sweeps_total;
  residual_norms.insert(residual_norms.end(), other.residual_norms.begin(), other.residual_norms.end());
  krylov_per_step.insert(krylov_per_step.end(), other.krylov_per_step.begin(), other.krylov_per_step.end());
  sweeps_per_step.insert(sweeps_per_step.end(), other.sweeps_per_step.begin(), other.sweeps_per_step.end());
  reduction_rates.insert(reduction_rates.end(), other.reduction_rates.begin(), other.reduction_rates.end());
  sweep_residuals.insert(sweep_residuals.end(), other.sweep_residuals.begin(), other.sweep_residuals.end());
  stagnated = stagnated || other.stagnated;
  wall_seconds += other.wall_seconds;
}

namespace {

using Clock = std::chrono::steady_clock;

double residual_norm(const PartitionedVector& r) {
  const double n = norm2(r.all());
  if (!std::isfinite(n)) throw Error(ErrorKind::NonFinite, "non-finite nonlinear residual");
  return n;
}

[[noreturn]] void fail_newton(const SolveStats& stats, const NewtonConfig& config) {
  std::ostringstream msg;
  msg << "Newton did not reach tol " << config.tol_newton << " within " << config.max_newton
      << " steps (last residual " << stats.residual_norms.back() << ")";
  throw Error(ErrorKind::NotConverged, msg.str());
}

MgOptions mg_options(MgMode mode, const NewtonConfig& config) {
  return {mode, config.smoothing_steps, config.smoothing_steps};
}

}  // namespace

SolveResult newton_coupled(const Discretization& disc, const Problem& problem, SystemState initial,
                           const NewtonConfig& config) {
  config.validate();
  const auto start = Clock::now();
  SolveResult out{std::move(initial), {}};
  SystemState& state = out.state;
  SolveStats& stats = out.stats;

  PartitionedVector F = assemble_residual(disc, problem, state);
  double norm = residual_norm(F);
  stats.residual_norms.push_back(norm);

  std::optional<Multigrid> mg;
  while (norm > config.tol_newton) {
    if (stats.newton_steps >= config.max_newton) fail_newton(stats, config);
    if (!mg || !config.jacobian_reuse) {
      mg.emplace(disc, build_level_matrices(disc, problem, state), mg_options(config.smoother, config));
    }
    const CoupledMatrix& J = mg->level_matrix(mg->finest());
    std::vector<double> rhs(F.all().begin(), F.all().end());
    for (double& x : rhs) x = -x;
    PartitionedVector delta(F.n_pde(), F.n_ode());
    const GmresResult lin = gmres([&](auto x, auto y) { J.multiply(x, y); },
                                  [&](auto x, auto y) { mg->apply(x, y); }, rhs, delta.all(),
                                  {config.tol_iter, config.max_gmres});
    if (!lin.converged) {
      throw Error(ErrorKind::NotConverged, "GMRES did not converge within " + std::to_string(config.max_gmres) +
                                               " iterations in Newton step " + std::to_string(stats.newton_steps + 1));
    }
    state.add(delta);
    F = assemble_residual(disc, problem, state);
    norm = residual_norm(F);
    ++stats.newton_steps;
    stats.krylov_total += lin.iterations;
    stats.krylov_per_step.push_back(lin.iterations);
    stats.sweeps_per_step.push_back(0);
    stats.reduction_rates.push_back(lin.reduction_rate());
    stats.residual_norms.push_back(norm);
  }
  stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SolveResult newton_decoupled(const Discretization& disc, const Problem& problem, SystemState initial,
                             const NewtonConfig& config) {
  config.validate();
  const auto start = Clock::now();
  SolveResult out{std::move(initial), {}};
  SystemState& state = out.state;
  SolveStats& stats = out.stats;

  PartitionedVector F = assemble_residual(disc, problem, state);
  double norm = residual_norm(F);
  stats.residual_norms.push_back(norm);

  std::optional<Multigrid> mg;
  std::vector<Block3> ode_inverse;
  const int sweep_cap = config.max_iter_fixedpoint > 0 ? config.max_iter_fixedpoint : config.max_sweeps;

  while (norm > config.tol_newton) {
    if (stats.newton_steps >= config.max_newton) fail_newton(stats, config);
    if (!mg || !config.jacobian_reuse) {
      mg.emplace(disc, build_level_matrices(disc, problem, state), mg_options(MgMode::PdeOnly, config));
      ode_inverse.clear();
      for (const Block3& b : mg->level_matrix(mg->finest()).B_vv) ode_inverse.push_back(invert3(b));
    }
    const CoupledMatrix& J = mg->level_matrix(mg->finest());
    const auto np = static_cast<std::size_t>(J.n_pde());
    const auto no = static_cast<std::size_t>(J.n_ode());

    std::vector<double> rhs(F.all().begin(), F.all().end());
    for (double& x : rhs) x = -x;
    const std::span<const double> rhs_u(rhs.data(), np), rhs_v(rhs.data() + np, no);
    const double res0 = norm2(rhs);

    PartitionedVector delta(J.n_pde(), J.n_ode());
    auto du = delta.pde();
    auto dv = delta.ode();
    std::vector<double> g(no), f(np), corr(np), lin(rhs.size());
    std::vector<double> history;
    int sweeps = 0, krylov = 0;
    double rate_log_sum = 0.0;
    for (;;) {
      // ODE rows with the PDE update of the previous sweep.
      J.B_vu.multiply(du, g);
      for (std::size_t i = 0; i < no; ++i) g[i] = rhs_v[i] - g[i];
      for (std::size_t c = 0; c < ode_inverse.size(); ++c) {
        const Block3& inv = ode_inverse[c];
        for (int a = 0; a < 3; ++a) {
          dv[3 * c + a] = inv[3 * a] * g[3 * c] + inv[3 * a + 1] * g[3 * c + 1] + inv[3 * a + 2] * g[3 * c + 2];
        }
      }
      // PDE rows with the new ODE update; GMRES solves for the increment.
      J.A_uu.multiply(du, f);
      J.A_uv.multiply_add(dv, f);
      for (std::size_t i = 0; i < np; ++i) f[i] = rhs_u[i] - f[i];
      std::fill(corr.begin(), corr.end(), 0.0);
      const GmresResult sub = gmres([&](auto x, auto y) { J.A_uu.multiply(x, y); },
                                    [&](auto x, auto y) { mg->apply(x, y); }, f, corr,
                                    {config.tol_iter, config.max_gmres});
      if (!sub.converged) {
        throw Error(ErrorKind::NotConverged, "PDE GMRES did not converge in decoupled sweep");
      }
      for (std::size_t i = 0; i < np; ++i) du[i] += corr[i];
      krylov += sub.iterations;
      if (sub.iterations > 0) rate_log_sum += sub.iterations * std::log10(sub.reduction_rate());
      ++sweeps;

      J.multiply(delta.all(), lin);
      for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = rhs[i] - lin[i];
      const double res = res0 > 0.0 ? norm2(lin) / res0 : 0.0;
      if (!std::isfinite(res)) throw Error(ErrorKind::NonFinite, "decoupled fixed point produced non-finite values");
      history.push_back(res);
      if (res <= config.tol_iter || sweeps >= sweep_cap) break;
      if (history.size() > 10 && res > (1.0 - 1e-3) * history[history.size() - 11]) {
        stats.stagnated = true;
        break;
      }
    }

    state.add(delta);
    F = assemble_residual(disc, problem, state);
    norm = residual_norm(F);
    ++stats.newton_steps;
    stats.krylov_total += krylov;
    stats.sweeps_total += sweeps;
    stats.krylov_per_step.push_back(krylov);
    stats.sweeps_per_step.push_back(sweeps);
    stats.reduction_rates.push_back(krylov > 0 ? std::pow(10.0, rate_log_sum / krylov) : 1.0);
    stats.sweep_residuals.push_back(std::move(history));
    stats.residual_norms.push_back(norm);
  }
  stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SolveResult solve(Approach approach, const Discretization& disc, const Problem& problem, SystemState initial,
                  const NewtonConfig& config) {
  return approach == Approach::Coupled ? newton_coupled(disc, problem, std::move(initial), config)
                                       : newton_decoupled(disc, problem, std::move(initial), config);
}

SystemState pseudo_timestep_globalize(const Discretization& disc, const ModelParams& params, SystemState initial,
                                      const NewtonConfig& config, std::span<const double> dt_sequence,
                                      SolveStats* stats) {
  SystemState state = std::move(initial);
  for (double dt : dt_sequence) {
    SystemState prev = state;
    SolveResult step = newton_coupled(disc, Problem::step(params, dt, std::move(prev)), std::move(state), config);
    if (stats) stats->merge(step.stats);
    state = std::move(step.state);
  }
  return state;
}

}  // namespace cyto
