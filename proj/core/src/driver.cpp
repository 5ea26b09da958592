#include "cyto/driver.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <ostream>

#include "cyto/error.hpp"

namespace cyto {

SystemState initial_state(const Discretization& disc, const RunConfig& config) {
  const ModelParams& p = config.model.params;
  SystemState s = disc.rest_state(disc.finest(), p);
  std::fill(s.u.begin(), s.u.end(), config.model.initial_u);
  const double R0 = config.model.initial_R.value_or(p.rest_receptors());
  for (auto& v : s.v) v = {R0, config.model.initial_C, config.model.initial_E};
  return s;
}

namespace {

void record_stamp(Trajectory& traj, const Discretization& disc, double t, const SystemState& s, SolveStats stats) {
  traj.times.push_back(t);
  traj.receptors.push_back(s.v);
  traj.u_tilde.push_back(disc.surface_averages(s.u, s.level));
  traj.stats.push_back(std::move(stats));
}

void check_mesh(const Discretization& disc, const RunConfig& config) {
  const MeshConfig& m = disc.mesh().config;
  if (m.cells_per_axis != config.mesh.cells_per_axis || m.levels != config.mesh.levels || m.gap != config.mesh.gap ||
      m.cell_side != config.mesh.cell_side) {
    throw Error(ErrorKind::InvalidConfig, "discretization does not match the mesh section of the run config");
  }
}

}  // namespace

Trajectory run_transient(const Discretization& disc, const RunConfig& config, const StepObserver& observer) {
  config.validate();
  check_mesh(disc, config);
  const ModelParams params = config.resolved_params();
  const double dt = config.time.dt;
  const int steps = config.num_steps();

  Trajectory traj;
  SystemState state = initial_state(disc, config);
  record_stamp(traj, disc, 0.0, state, {});
  if (observer) observer(0, 0.0, state);
  for (int n = 1; n <= steps; ++n) {
    SolveResult r;
    try {
      r = solve(config.approach, disc, Problem::step(params, dt, state), state, config.solver);
    } catch (const Error& e) {
      throw Error(e.kind(), "time step " + std::to_string(n) + " (t = " + std::to_string(n * dt) + " h): " + e.what());
    }
    state = std::move(r.state);
    traj.total.merge(r.stats);
    record_stamp(traj, disc, n * dt, state, std::move(r.stats));
    if (observer) observer(n, n * dt, state);
  }
  traj.final_state = std::move(state);
  return traj;
}

Trajectory run_transient(const RunConfig& config) {
  config.validate();
  const Discretization disc(config.mesh);
  return run_transient(disc, config);
}

StationaryResult run_stationary(const Discretization& disc, const RunConfig& config, bool with_report) {
  config.validate();
  check_mesh(disc, config);
  const ModelParams params = config.resolved_params();
  StationaryResult out;
  SystemState start = initial_state(disc, config);
  if (!config.time.pseudo_dt.empty()) {
    start = pseudo_timestep_globalize(disc, params, std::move(start), config.solver, config.time.pseudo_dt,
                                      &out.pseudo_stats);
  }
  SolveResult r = solve(config.approach, disc, Problem::steady(params), std::move(start), config.solver);
  out.state = std::move(r.state);
  out.stats = std::move(r.stats);
  if (with_report) out.report = coupling_strength(disc, out.state, params, {config.solver.tol_iter, config.solver.max_gmres});
  return out;
}

StationaryResult run_stationary(const RunConfig& config) {
  config.validate();
  const Discretization disc(config.mesh);
  return run_stationary(disc, config);
}

std::vector<RunRecord> run_comparison(std::span<const RunConfig> runs) {
  std::vector<RunRecord> records;
  std::unique_ptr<Discretization> disc;
  for (const RunConfig& cfg : runs) {
    RunRecord rec;
    rec.scenario = cfg.model.scenario;
    rec.approach = cfg.approach;
    rec.smoother = cfg.solver.smoother;
    rec.level = cfg.mesh.levels;
    rec.num_cells = cfg.mesh.num_cells();
    rec.k_d = cfg.model.params.k_d;
    rec.dt = cfg.time.stationary ? 0.0 : cfg.time.dt;
    rec.max_iter = cfg.approach == Approach::Decoupled ? cfg.solver.max_iter_fixedpoint : 0;
    try {
      cfg.validate();
      const MeshConfig* have = disc ? &disc->mesh().config : nullptr;
      if (!have || have->cells_per_axis != cfg.mesh.cells_per_axis || have->levels != cfg.mesh.levels ||
          have->gap != cfg.mesh.gap || have->cell_side != cfg.mesh.cell_side) {
        disc.reset();
        disc = std::make_unique<Discretization>(cfg.mesh);
      }
      if (cfg.time.stationary) {
        rec.stats = run_stationary(*disc, cfg, false).stats;
      } else {
        rec.stats = run_transient(*disc, cfg).total;
      }
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

TableKind parse_table_kind(const std::string& s) {
  if (s == "smoother") return TableKind::Smoother;
  if (s == "stationary") return TableKind::Stationary;
  if (s == "transient") return TableKind::Transient;
  if (s == "scaling") return TableKind::Scaling;
  throw Error(ErrorKind::InvalidConfig, "table must be smoother, stationary, transient or scaling, got '" + s + "'");
}

const char* to_string(TableKind kind) noexcept {
  switch (kind) {
    case TableKind::Smoother: return "smoother";
    case TableKind::Stationary: return "stationary";
    case TableKind::Transient: return "transient";
    case TableKind::Scaling: return "scaling";
  }
  return "unknown";
}

std::vector<RunConfig> comparison_matrix(TableKind kind, const RunConfig& base, const MatrixOptions& options) {
  std::vector<RunConfig> out;
  switch (kind) {
    case TableKind::Smoother:
      for (int L : options.levels) {
        for (MgMode s : {MgMode::CoupledS1, MgMode::CoupledS2}) {
          RunConfig c = base;
          c.time.stationary = true;
          c.approach = Approach::Coupled;
          c.mesh.levels = L;
          c.solver.smoother = s;
          out.push_back(c);
        }
      }
      break;
    case TableKind::Stationary:
      for (const auto& [name, kd] : {std::pair<const char*, double>{"biological", base.model.params.k_d},
                                     std::pair<const char*, double>{"artificial", 1000.0}}) {
        for (int L : options.levels) {
          for (Approach a : {Approach::Decoupled, Approach::Coupled}) {
            RunConfig c = base;
            c.time.stationary = true;
            c.model.scenario = name;
            c.model.params.k_d = kd;
            c.mesh.levels = L;
            c.approach = a;
            c.solver.max_iter_fixedpoint = 0;
            out.push_back(c);
          }
        }
      }
      break;
    case TableKind::Transient:
      for (double dt : options.dts) {
        for (int m : options.max_iters) {
          RunConfig c = base;
          c.time.stationary = false;
          c.time.dt = dt;
          c.approach = Approach::Decoupled;
          c.solver.max_iter_fixedpoint = m;
          out.push_back(c);
        }
        RunConfig c = base;
        c.time.stationary = false;
        c.time.dt = dt;
        c.approach = Approach::Coupled;
        out.push_back(c);
      }
      break;
    case TableKind::Scaling:
      for (int n : options.cells_per_axis) {
        for (Approach a : {Approach::Coupled, Approach::Decoupled}) {
          RunConfig c = base;
          c.time.stationary = false;
          c.mesh.cells_per_axis = n;
          c.model.secreting_count = -1;
          c.approach = a;
          if (a == Approach::Decoupled && c.solver.max_iter_fixedpoint == 0) c.solver.max_iter_fixedpoint = 1;
          out.push_back(c);
        }
      }
      break;
  }
  return out;
}

namespace {

const char* status(const RunRecord& r) { return r.ok ? "ok" : "failed"; }

}  // namespace

void write_table(std::ostream& os, TableKind kind, std::span<const RunRecord> records) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  switch (kind) {
    case TableKind::Smoother:
      os << "level,smoother,log10_r,sum_s,newton_steps,status\n";
      for (const auto& r : records) {
        os << r.level << ',' << to_string(r.smoother) << ',' << r.stats.mean_log10_rate() << ',' << r.stats.krylov_total
           << ',' << r.stats.newton_steps << ',' << status(r) << '\n';
      }
      break;
    case TableKind::Stationary:
      os << "scenario,k_d,level,approach,n,s_bar,sum_s,status\n";
      for (const auto& r : records) {
        os << r.scenario << ',' << r.k_d << ',' << r.level << ',' << to_string(r.approach) << ',' << r.stats.newton_steps
           << ',' << r.stats.krylov_avg() << ',' << r.stats.krylov_total << ',' << status(r) << '\n';
      }
      break;
    case TableKind::Transient:
      os << "dt,approach,max_iter,sum_n,sum_s,status\n";
      for (const auto& r : records) {
        os << r.dt << ',' << to_string(r.approach) << ',' << r.max_iter << ',' << r.stats.newton_steps << ','
           << r.stats.krylov_total << ',' << status(r) << '\n';
      }
      break;
    case TableKind::Scaling: {
      os << "num_cells,sum_n_c,sum_s_c,sum_n_d,sum_s_d,ratio\n";
      std::map<int, std::pair<const RunRecord*, const RunRecord*>> rows;
      for (const auto& r : records) {
        auto& slot = rows[r.num_cells];
        (r.approach == Approach::Coupled ? slot.first : slot.second) = &r;
      }
      for (const auto& [nc, pair] : rows) {
        const auto [c, d] = pair;
        os << nc << ',';
        if (c && c->ok) os << c->stats.newton_steps << ',' << c->stats.krylov_total;
        else os << ',';
        os << ',';
        if (d && d->ok) os << d->stats.newton_steps << ',' << d->stats.krylov_total;
        else os << ',';
        os << ',';
        if (c && d && c->ok && d->ok && d->stats.krylov_total > 0) {
          os << static_cast<double>(c->stats.krylov_total) / static_cast<double>(d->stats.krylov_total);
        }
        os << '\n';
      }
      break;
    }
  }
  os.precision(old);
}

}  // namespace cyto
