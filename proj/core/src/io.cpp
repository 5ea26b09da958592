#include "cyto/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cyto/error.hpp"

namespace cyto {

const char* code_version() noexcept { return CYTO_VERSION; }

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.precision(std::numeric_limits<double>::max_digits10);
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

}  // namespace

void export_vtk(const Discretization& disc, const SystemState& state, const std::filesystem::path& path) {
  const HexMesh& mesh = disc.mesh().mesh(state.level);
  const DofMap& dofs = disc.mesh().dof(state.level);
  if (state.n_pde() != dofs.n_pde()) throw Error(ErrorKind::DimensionMismatch, "export_vtk: state does not match mesh level");
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\nIL-2 concentration\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << dofs.n_pde() << " double\n";
  for (Index d = 0; d < dofs.n_pde(); ++d) {
    const Point3& x = mesh.vertices[dofs.dof_to_vertex[d]];
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  }
  const std::size_t ne = mesh.num_elements();
  out << "CELLS " << ne << ' ' << 9 * ne << '\n';
  static constexpr int kVtkOrder[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  for (const auto& e : mesh.elements) {
    out << 8;
    for (int a : kVtkOrder) out << ' ' << dofs.vertex_to_dof[e[a]];
    out << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (std::size_t e = 0; e < ne; ++e) out << "12\n";
  out << "POINT_DATA " << dofs.n_pde() << "\nSCALARS il2_nM double 1\nLOOKUP_TABLE default\n";
  for (double u : state.u) out << u << '\n';
  finish(out, path);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const std::size_t nc = traj.receptors.empty() ? 0 : traj.receptors.front().size();
  os << "t,newton_steps,krylov,sweeps";
  for (std::size_t c = 0; c < nc; ++c) os << ",R_" << c << ",C_" << c << ",E_" << c << ",u_tilde_" << c;
  os << '\n';
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const SolveStats& st = traj.stats[s];
    os << traj.times[s] << ',' << st.newton_steps << ',' << st.krylov_total << ',' << st.sweeps_total;
    for (std::size_t c = 0; c < nc; ++c) {
      const Receptors& v = traj.receptors[s][c];
      os << ',' << v[kR] << ',' << v[kC] << ',' << v[kE] << ',' << traj.u_tilde[s][c];
    }
    os << '\n';
  }
  os.precision(old);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Io, "trajectory CSV: missing header");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 4 || (columns - 4) % 4 != 0) throw Error(ErrorKind::Io, "trajectory CSV: unexpected header");
  const std::size_t nc = (columns - 4) / 4;
  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        f.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "trajectory CSV: bad number '" + cell + "'");
      }
    }
    if (f.size() != columns) throw Error(ErrorKind::Io, "trajectory CSV: wrong column count");
    traj.times.push_back(f[0]);
    SolveStats st;
    st.newton_steps = static_cast<int>(f[1]);
    st.krylov_total = static_cast<long>(f[2]);
    st.sweeps_total = static_cast<long>(f[3]);
    traj.stats.push_back(st);
    std::vector<Receptors> v(nc);
    std::vector<double> ut(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      v[c] = {f[4 + 4 * c], f[5 + 4 * c], f[6 + 4 * c]};
      ut[c] = f[7 + 4 * c];
    }
    traj.receptors.push_back(std::move(v));
    traj.u_tilde.push_back(std::move(ut));
  }
  return traj;
}

void write_stats_csv(std::ostream& os, const SolveStats& stats) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "step,residual_norm,krylov,sweeps,reduction_rate\n";
  for (std::size_t i = 0; i < stats.residual_norms.size(); ++i) {
    os << i << ',' << stats.residual_norms[i] << ',';
    if (i > 0 && i - 1 < stats.krylov_per_step.size()) {
      os << stats.krylov_per_step[i - 1] << ',' << stats.sweeps_per_step[i - 1] << ',' << stats.reduction_rates[i - 1];
    } else {
      os << ",,";
    }
    os << '\n';
  }
  os.precision(old);
}

void write_field_csv(std::ostream& os, const Discretization& disc, const SystemState& state) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "dof,x,y,z,u\n";
  for (Index d = 0; d < state.n_pde(); ++d) {
    const Point3 x = disc.mesh().dof_point(state.level, d);
    os << d << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << state.u[d] << '\n';
  }
  os.precision(old);
}

void write_cells_csv(std::ostream& os, const Discretization& disc, const SystemState& state) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const auto ut = disc.surface_averages(state.u, state.level);
  os << "cell,R,C,E,u_tilde,activated\n";
  for (int c = 0; c < state.num_cells(); ++c) {
    const Receptors& v = state.v[c];
    os << c << ',' << v[kR] << ',' << v[kC] << ',' << v[kE] << ',' << ut[c] << ',' << (is_activated(v) ? 1 : 0) << '\n';
  }
  os.precision(old);
}

void export_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_trajectory_csv(out, traj);
  finish(out, path);
}

void export_csv(const std::filesystem::path& path, const SolveStats& stats) {
  auto out = open_out(path);
  write_stats_csv(out, stats);
  finish(out, path);
}

void export_csv(const std::filesystem::path& path, const CouplingReport& report) {
  auto out = open_out(path);
  write_report_csv(out, report);
  finish(out, path);
}

namespace {

nlohmann::json config_json(const RunConfig& c) {
  std::stringstream ss;
  write_run_config(ss, c);
  nlohmann::json j = nlohmann::json::object();
  std::string line, section;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      j[section] = nlohmann::json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    j[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

}  // namespace

void write_metadata(const std::filesystem::path& dir, const RunConfig& config, const Discretization& disc,
                    std::string_view command) {
  nlohmann::json j;
  j["code_version"] = code_version();
  j["command"] = command;
  j["seed"] = config.model.seed;
  j["units"] = {{"length", "um"},
                {"time", "h"},
                {"concentration", "nM"},
                {"receptors", "molecules/cell"},
                {"alpha", "molecules um^-3 nM^-1"}};
  j["config"] = config_json(config);
  j["secreting_cells"] = config.secreting_cells();
  nlohmann::json levels = nlohmann::json::array();
  for (int l = 0; l <= disc.finest(); ++l) {
    levels.push_back({{"level", l}, {"pde_dofs", disc.n_pde(l)}, {"elements", disc.mesh().mesh(l).num_elements()}});
  }
  j["mesh_levels"] = levels;
  j["num_cells"] = disc.num_cells();
  j["ode_dofs"] = disc.n_ode();
  const auto path = dir / "metadata.json";
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

std::string error_record(std::string_view kind, std::string_view message) {
  nlohmann::json j{{"status", "error"}, {"kind", kind}, {"message", message}};
  return j.dump();
}

}  // namespace cyto
