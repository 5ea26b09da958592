// cytosolve: stationary and transient IL-2 simulations, coupling analysis and
// solver comparison campaigns.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "cyto/config.hpp"
#include "cyto/driver.hpp"
#include "cyto/error.hpp"
#include "cyto/io.hpp"

namespace {

using namespace cyto;

struct GlobalOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
  std::string approach;
  std::string smoother;
};

RunConfig resolve(const GlobalOptions& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (!g.out.empty()) cfg.output.directory = g.out;
  if (g.seed) cfg.model.seed = *g.seed;
  if (g.level) cfg.mesh.levels = *g.level;
  if (!g.approach.empty()) cfg.approach = parse_approach(g.approach);
  if (!g.smoother.empty()) cfg.solver.smoother = parse_smoother(g.smoother);
  cfg.validate();
  return cfg;
}

void write_resolved_config(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output.directory);
  std::ofstream out(cfg.output.directory / "config.ini");
  write_run_config(out, cfg);
}

void print_stats(const char* what, const SolveStats& s) {
  std::cout << what << ": newton " << s.newton_steps << ", gmres " << s.krylov_total;
  if (s.sweeps_total > 0) std::cout << ", sweeps " << s.sweeps_total;
  if (s.stagnated) std::cout << " (stagnated)";
  std::cout << ", " << s.wall_seconds << " s\n";
}

int cmd_steady(const GlobalOptions& g, bool report_only) {
  RunConfig cfg = resolve(g);
  cfg.time.stationary = true;
  const Discretization disc(cfg.mesh);
  const auto dir = cfg.output.directory;
  const StationaryResult res = run_stationary(disc, cfg);
  write_resolved_config(cfg);
  write_metadata(dir, cfg, disc, report_only ? "sensitivity" : "steady");
  if (!report_only) {
    print_stats("stationary", res.stats);
    if (cfg.output.csv) {
      export_csv(dir / "newton.csv", res.stats);
      std::ofstream cells(dir / "cells.csv");
      write_cells_csv(cells, disc, res.state);
      std::ofstream field(dir / "field.csv");
      write_field_csv(field, disc, res.state);
    }
    if (cfg.output.vtk) export_vtk(disc, res.state, dir / "stationary.vtk");
  }
  write_report_text(std::cout, res.report);
  export_csv(dir / "coupling.csv", res.report);
  std::ofstream txt(dir / "coupling.txt");
  write_report_text(txt, res.report);
  return 0;
}

int cmd_transient(const GlobalOptions& g) {
  RunConfig cfg = resolve(g);
  cfg.time.stationary = false;
  const Discretization disc(cfg.mesh);
  const auto dir = cfg.output.directory;
  write_resolved_config(cfg);
  const int steps = cfg.num_steps();
  auto observer = [&](int step, double, const SystemState& s) {
    if (!cfg.output.vtk) return;
    const bool every = cfg.output.vtk_every > 0 && step % cfg.output.vtk_every == 0;
    if (every || step == steps) {
      std::ostringstream name;
      name << "u_" << std::setw(5) << std::setfill('0') << step << ".vtk";
      export_vtk(disc, s, dir / name.str());
    }
  };
  const Trajectory traj = run_transient(disc, cfg, observer);
  write_metadata(dir, cfg, disc, "transient");
  print_stats("transient", traj.total);
  if (cfg.output.csv) {
    export_csv(dir / "trajectory.csv", traj);
    std::ofstream cells(dir / "cells.csv");
    write_cells_csv(cells, disc, traj.final_state);
  }
  return 0;
}

int cmd_compare(const GlobalOptions& g, const std::string& table, const MatrixOptions& options) {
  RunConfig cfg = resolve(g);
  const TableKind kind = parse_table_kind(table);
  const auto runs = comparison_matrix(kind, cfg, options);
  const auto records = run_comparison(runs);
  std::filesystem::create_directories(cfg.output.directory);
  write_resolved_config(cfg);
  const auto path = cfg.output.directory / (std::string("compare_") + to_string(kind) + ".csv");
  std::ofstream out(path);
  write_table(out, kind, records);
  write_table(std::cout, kind, records);
  for (const auto& r : records) {
    if (!r.ok) std::cerr << "run failed (" << to_string(r.approach) << ", L=" << r.level << "): " << r.error << "\n";
  }
  return 0;
}

int cmd_export(const GlobalOptions& g) {
  RunConfig cfg = resolve(g);
  cfg.time.stationary = true;
  const Discretization disc(cfg.mesh);
  const auto dir = cfg.output.directory;
  const StationaryResult res = run_stationary(disc, cfg, false);
  write_resolved_config(cfg);
  write_metadata(dir, cfg, disc, "export");
  export_vtk(disc, res.state, dir / "stationary.vtk");
  std::ofstream field(dir / "field.csv");
  write_field_csv(field, disc, res.state);
  std::ofstream cells(dir / "cells.csv");
  write_cells_csv(cells, disc, res.state);
  std::cout << "wrote " << (dir / "stationary.vtk").string() << " (" << disc.n_pde(disc.finest()) << " points)\n";
  return 0;
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::InvalidConfig ? 2 : 1; }

void report_failure(const GlobalOptions& g, std::string_view kind, std::string_view message) {
  const std::string record = error_record(kind, message);
  std::cerr << record << "\n";
  if (!g.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(g.out, ec);
    std::ofstream(std::filesystem::path(g.out) / "error.json") << record << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IL-2 PDE/ODE solver with coupled and decoupled Newton-multigrid methods"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Seed for the choice of secreting cells");
  app.add_option("--level", g.level, "Finest refinement level")->check(CLI::NonNegativeNumber);
  app.add_option("--approach", g.approach, "coupled or decoupled")->check(CLI::IsMember({"coupled", "decoupled"}));
  app.add_option("--smoother", g.smoother, "s1 or s2")->check(CLI::IsMember({"s1", "s2"}));

  auto* steady = app.add_subcommand("steady", "Stationary solve and coupling strength");
  auto* transient = app.add_subcommand("transient", "Implicit Euler time marching");
  auto* sensitivity = app.add_subcommand("sensitivity", "Coupling strength report at the stationary solution");
  auto* compare = app.add_subcommand("compare", "Solver comparison campaign");
  auto* exporter = app.add_subcommand("export", "Write the stationary field as VTK and CSV");

  std::string table = "stationary";
  MatrixOptions matrix;
  compare->add_option("--table", table, "smoother, stationary, transient or scaling")
      ->check(CLI::IsMember({"smoother", "stationary", "transient", "scaling"}));
  compare->add_option("--levels", matrix.levels, "Levels for the smoother and stationary tables")->delimiter(',');
  compare->add_option("--dts", matrix.dts, "Time steps for the transient table")->delimiter(',');
  compare->add_option("--max-iters", matrix.max_iters, "Decoupled sweep caps for the transient table")->delimiter(',');
  compare->add_option("--cells-per-axis", matrix.cells_per_axis, "Cell lattices for the scaling table")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*steady) return cmd_steady(g, false);
    if (*sensitivity) return cmd_steady(g, true);
    if (*transient) return cmd_transient(g);
    if (*compare) return cmd_compare(g, table, matrix);
    if (*exporter) return cmd_export(g);
  } catch (const Error& e) {
    report_failure(g, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_failure(g, "internal", e.what());
    return 1;
  }
  return 0;
}
