#include "cyto/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "cyto/error.hpp"

namespace cyto {

Approach parse_approach(const std::string& s) {
  if (s == "coupled") return Approach::Coupled;
  if (s == "decoupled") return Approach::Decoupled;
  throw Error(ErrorKind::InvalidConfig, "approach must be coupled or decoupled, got '" + s + "'");
}

MgMode parse_smoother(const std::string& s) {
  if (s == "s1") return MgMode::CoupledS1;
  if (s == "s2") return MgMode::CoupledS2;
  throw Error(ErrorKind::InvalidConfig, "smoother must be s1 or s2, got '" + s + "'");
}

void RunConfig::validate() const {
  mesh.validate();
  resolved_params().validate();
  solver.validate();
  if (model.secreting_count < 0 && !(model.secreting_fraction >= 0.0 && model.secreting_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "secreting_fraction must lie in [0, 1]");
  }
  if (!(model.q_secreting >= 0.0)) throw Error(ErrorKind::InvalidConfig, "q_secreting must be nonnegative");
  if (!time.stationary) {
    if (!(time.dt > 0.0)) throw Error(ErrorKind::InvalidConfig, "dt must be positive");
    if (!(time.t_final >= time.dt)) throw Error(ErrorKind::InvalidConfig, "t_final must be >= dt");
  }
  for (double k : time.pseudo_dt) {
    if (!(k > 0.0)) throw Error(ErrorKind::InvalidConfig, "pseudo_dt entries must be positive");
  }
  if (output.vtk_every < 0) throw Error(ErrorKind::InvalidConfig, "vtk_every must be >= 0");
}

int RunConfig::num_steps() const { return static_cast<int>(std::llround(time.t_final / time.dt)); }

std::vector<int> RunConfig::secreting_cells() const {
  const int nc = mesh.num_cells();
  int count = model.secreting_count;
  if (count < 0) {
    count = static_cast<int>(std::lround(model.secreting_fraction * nc));
    if (model.secreting_fraction > 0.0) count = std::max(count, 1);
  }
  return choose_secreting(nc, count, model.seed);
}

ModelParams RunConfig::resolved_params() const {
  ModelParams p = model.params;
  p.q.assign(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  for (int c : secreting_cells()) p.q[c] = model.q_secreting;
  return p;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line) {
  throw Error(ErrorKind::InvalidConfig,
              "line " + std::to_string(line) + ": invalid value '" + value + "' for '" + key + "'");
}

double to_double(const std::string& key, const std::string& v, int line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v, line);
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v, int line) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, line);
  return x;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, line);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value, int line)>;

std::map<std::string, Setter> make_setters() {
  std::map<std::string, Setter> s;
  auto dbl = [&s](const std::string& name, auto field) {
    s[name] = [field](RunConfig& c, const std::string& k, const std::string& v, int l) { field(c) = to_double(k, v, l); };
  };
  auto integer = [&s](const std::string& name, auto field) {
    s[name] = [field](RunConfig& c, const std::string& k, const std::string& v, int l) { field(c) = to_int<int>(k, v, l); };
  };
  auto boolean = [&s](const std::string& name, auto field) {
    s[name] = [field](RunConfig& c, const std::string& k, const std::string& v, int l) { field(c) = to_bool(k, v, l); };
  };

  integer("mesh.cells_per_axis", [](RunConfig& c) -> int& { return c.mesh.cells_per_axis; });
  dbl("mesh.cell_side", [](RunConfig& c) -> double& { return c.mesh.cell_side; });
  dbl("mesh.gap", [](RunConfig& c) -> double& { return c.mesh.gap; });
  integer("mesh.levels", [](RunConfig& c) -> int& { return c.mesh.levels; });

  s["model.scenario"] = [](RunConfig& c, const std::string&, const std::string& v, int) { c.model.scenario = v; };
  dbl("model.mu", [](RunConfig& c) -> double& { return c.model.params.mu; });
  dbl("model.k_d", [](RunConfig& c) -> double& { return c.model.params.k_d; });
  dbl("model.w0", [](RunConfig& c) -> double& { return c.model.params.w0; });
  dbl("model.w1", [](RunConfig& c) -> double& { return c.model.params.w1; });
  dbl("model.K_half", [](RunConfig& c) -> double& { return c.model.params.K_half; });
  dbl("model.k_on", [](RunConfig& c) -> double& { return c.model.params.k_on; });
  dbl("model.k_off", [](RunConfig& c) -> double& { return c.model.params.k_off; });
  dbl("model.k_iR", [](RunConfig& c) -> double& { return c.model.params.k_iR; });
  dbl("model.k_iC", [](RunConfig& c) -> double& { return c.model.params.k_iC; });
  dbl("model.k_rec", [](RunConfig& c) -> double& { return c.model.params.k_rec; });
  dbl("model.k_deg", [](RunConfig& c) -> double& { return c.model.params.k_deg; });
  dbl("model.alpha", [](RunConfig& c) -> double& { return c.model.params.alpha; });
  dbl("model.q_secreting", [](RunConfig& c) -> double& { return c.model.q_secreting; });
  integer("model.secreting_count", [](RunConfig& c) -> int& { return c.model.secreting_count; });
  dbl("model.secreting_fraction", [](RunConfig& c) -> double& { return c.model.secreting_fraction; });
  s["model.seed"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
    c.model.seed = to_int<std::uint64_t>(k, v, l);
  };
  dbl("model.initial_u", [](RunConfig& c) -> double& { return c.model.initial_u; });
  s["model.initial_R"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
    if (v == "rest") c.model.initial_R.reset();
    else c.model.initial_R = to_double(k, v, l);
  };
  dbl("model.initial_C", [](RunConfig& c) -> double& { return c.model.initial_C; });
  dbl("model.initial_E", [](RunConfig& c) -> double& { return c.model.initial_E; });

  s["solver.approach"] = [](RunConfig& c, const std::string&, const std::string& v, int) { c.approach = parse_approach(v); };
  s["solver.smoother"] = [](RunConfig& c, const std::string&, const std::string& v, int) {
    c.solver.smoother = parse_smoother(v);
  };
  dbl("solver.tol_newton", [](RunConfig& c) -> double& { return c.solver.tol_newton; });
  dbl("solver.tol_iter", [](RunConfig& c) -> double& { return c.solver.tol_iter; });
  integer("solver.max_iter_fixedpoint", [](RunConfig& c) -> int& { return c.solver.max_iter_fixedpoint; });
  integer("solver.max_newton", [](RunConfig& c) -> int& { return c.solver.max_newton; });
  boolean("solver.jacobian_reuse", [](RunConfig& c) -> bool& { return c.solver.jacobian_reuse; });
  integer("solver.max_gmres", [](RunConfig& c) -> int& { return c.solver.max_gmres; });
  integer("solver.max_sweeps", [](RunConfig& c) -> int& { return c.solver.max_sweeps; });
  integer("solver.smoothing_steps", [](RunConfig& c) -> int& { return c.solver.smoothing_steps; });

  boolean("time.stationary", [](RunConfig& c) -> bool& { return c.time.stationary; });
  dbl("time.dt", [](RunConfig& c) -> double& { return c.time.dt; });
  dbl("time.t_final", [](RunConfig& c) -> double& { return c.time.t_final; });
  s["time.pseudo_dt"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
    c.time.pseudo_dt.clear();
    for (const auto& item : split_list(v)) c.time.pseudo_dt.push_back(to_double(k, item, l));
  };

  s["output.directory"] = [](RunConfig& c, const std::string&, const std::string& v, int) { c.output.directory = v; };
  s["output.formats"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
    c.output.csv = c.output.vtk = false;
    for (const auto& f : split_list(v)) {
      if (f == "csv") c.output.csv = true;
      else if (f == "vtk") c.output.vtk = true;
      else bad_value(k, f, l);
    }
  };
  integer("output.vtk_every", [](RunConfig& c) -> int& { return c.output.vtk_every; });
  return s;
}

const std::map<std::string, Setter>& setters() {
  static const auto table = make_setters();
  return table;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string section, raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    std::string text = trim(std::string_view(raw).substr(0, comment));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": bad section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      static const std::array<const char*, 5> known = {"mesh", "model", "solver", "time", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": expected key = value");
    if (section.empty()) throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": key outside a section");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = setters().find(section + "." + key);
    if (it == setters().end()) {
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": unknown key '" + key + "' in [" + section + "]");
    }
    it->second(cfg, key, value, line);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  return parse_run_config(in);
}

void write_run_config(std::ostream& out, const RunConfig& c) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  const auto& p = c.model.params;
  out << "[mesh]\n"
      << "cells_per_axis = " << c.mesh.cells_per_axis << "\n"
      << "cell_side = " << c.mesh.cell_side << "\n"
      << "gap = " << c.mesh.gap << "\n"
      << "levels = " << c.mesh.levels << "\n\n"
      << "[model]\n"
      << "scenario = " << c.model.scenario << "\n"
      << "mu = " << p.mu << "\nk_d = " << p.k_d << "\nw0 = " << p.w0 << "\nw1 = " << p.w1 << "\nK_half = " << p.K_half
      << "\nk_on = " << p.k_on << "\nk_off = " << p.k_off << "\nk_iR = " << p.k_iR << "\nk_iC = " << p.k_iC
      << "\nk_rec = " << p.k_rec << "\nk_deg = " << p.k_deg << "\nalpha = " << p.alpha << "\n"
      << "q_secreting = " << c.model.q_secreting << "\n"
      << "secreting_count = " << c.model.secreting_count << "\n"
      << "secreting_fraction = " << c.model.secreting_fraction << "\n"
      << "seed = " << c.model.seed << "\n"
      << "initial_u = " << c.model.initial_u << "\n";
  if (c.model.initial_R) out << "initial_R = " << *c.model.initial_R << "\n";
  else out << "initial_R = rest\n";
  out << "initial_C = " << c.model.initial_C << "\n"
      << "initial_E = " << c.model.initial_E << "\n\n"
      << "[solver]\n"
      << "approach = " << to_string(c.approach) << "\n"
      << "smoother = " << to_string(c.solver.smoother) << "\n"
      << "tol_newton = " << c.solver.tol_newton << "\n"
      << "tol_iter = " << c.solver.tol_iter << "\n"
      << "max_iter_fixedpoint = " << c.solver.max_iter_fixedpoint << "\n"
      << "max_newton = " << c.solver.max_newton << "\n"
      << "jacobian_reuse = " << (c.solver.jacobian_reuse ? "true" : "false") << "\n"
      << "max_gmres = " << c.solver.max_gmres << "\n"
      << "max_sweeps = " << c.solver.max_sweeps << "\n"
      << "smoothing_steps = " << c.solver.smoothing_steps << "\n\n"
      << "[time]\n"
      << "stationary = " << (c.time.stationary ? "true" : "false") << "\n"
      << "dt = " << c.time.dt << "\n"
      << "t_final = " << c.time.t_final << "\n"
      << "pseudo_dt = ";
  for (std::size_t i = 0; i < c.time.pseudo_dt.size(); ++i) out << (i ? ", " : "") << c.time.pseudo_dt[i];
  out << "\n\n[output]\n"
      << "directory = " << c.output.directory.string() << "\n"
      << "formats = ";
  std::vector<std::string> formats;
  if (c.output.csv) formats.push_back("csv");
  if (c.output.vtk) formats.push_back("vtk");
  for (std::size_t i = 0; i < formats.size(); ++i) out << (i ? ", " : "") << formats[i];
  out << "\nvtk_every = " << c.output.vtk_every << "\n";
  out.precision(old);
}

}  // namespace cyto
