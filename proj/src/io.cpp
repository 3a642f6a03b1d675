#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "noflow/baselines.hpp"
#include "noflow/experiment.hpp"

namespace noflow {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_solution_csv(std::ostream& os, const RunArtifacts& a) {
  os << "component,x,value,time\n";
  for (const Snapshot& s : a.snapshots) {
    for (size_t c = 0; c < s.fields.size(); ++c) {
      const CellField<double>& f = s.fields[c];
      for (Index j = 0; j < f.size(); ++j) {
        os << s.components[c] << ',' << format_real(f.grid.center(j)) << ',' << format_real(f[j]) << ','
           << format_real(s.time) << '\n';
      }
    }
  }
}

void write_monitors_csv(std::ostream& os, const RunArtifacts& a) {
  os << "step,t,dt,mass,tv,umin,umax,entropy_residual\n";
  for (const MonitorRow& r : a.monitors) {
    os << r.step << ',' << format_real(r.t) << ',' << format_real(r.dt) << ',' << format_real(r.mass) << ','
       << format_real(r.tv) << ',' << format_real(r.umin) << ',' << format_real(r.umax) << ','
       << (r.entropy_residual ? format_real(*r.entropy_residual) : std::string()) << '\n';
  }
}

void write_errors_csv(std::ostream& os, const ErrorTable& t) {
  os << "cells,h,l1,w1\n";
  for (const ErrorRow& r : t.rows) {
    os << r.cells << ',' << format_real(r.h) << ',' << format_real(r.l1) << ','
       << (r.w1 ? format_real(*r.w1) : std::string()) << '\n';
  }
}

void write_monitor_report_csv(std::ostream& os, const MonitorReport& r) {
  os << "check,applicable,pass,value,tolerance,detail\n";
  for (const MonitorCheck& c : r.checks) {
    std::string detail = c.detail;
    for (char& ch : detail) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    os << c.name << ',' << (c.applicable ? 1 : 0) << ',' << (c.pass ? 1 : 0) << ',' << format_real(c.value) << ','
       << format_real(c.tolerance) << ',' << detail << '\n';
  }
}

std::string metadata_json(const ExperimentSpec& spec, const RunArtifacts* a, const ErrorTable* t) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["model"] = to_string(spec.model);
  j["scheme"] = to_string(spec.scheme);
  j["cells"] = spec.n_cells;
  j["t_final"] = spec.t_final;
  j["x_left"] = spec.x_left;
  j["x_right"] = spec.x_right;
  j["boundary"] = spec.boundary == Boundary::Periodic ? "periodic" : "constant_extension";
  j["limiter"] = spec.limiter.name();
  j["alpha"] = spec.limiter.alpha;
  j["cfl"] = spec.cfl;
  j["baseline_cfl"] = kBaselineCfl;
  j["k_mode"] = spec.k_mode.mode == KShiftMode::Zero    ? "zero"
                : spec.k_mode.mode == KShiftMode::Auto ? "auto"
                                                       : "fixed";
  j["tvni_mode"] = spec.tvni_mode;
  j["snapshots"] = spec.snapshots;
  if (spec.dt_fixed) j["dt"] = *spec.dt_fixed;
  if (spec.nonlocal()) {
    j["vmax"] = spec.vmax;
    j["kernel_min_cells"] = spec.kernel_min_cells;
  }
  if (spec.model == ModelKind::Custom) {
    j["custom_flux"] = spec.custom_flux;
    j["custom_initial"] = spec.custom_initial;
    j["advection_speed"] = spec.advection_speed;
    j["seed"] = spec.seed;
  }
  if (a) {
    j["k_used"] = a->k_used;
    j["steps"] = a->monitors.size();
    j["initial_range"] = {a->u0_min, a->u0_max};
    j["wall_seconds"] = a->wall_seconds;
  }
  if (t) {
    j["cell_counts"] = spec.cell_counts;
    j["reference_cells"] = spec.reference_cells;
    j["fit_l1"] = {{"C", t->fit_l1.c}, {"p", t->fit_l1.p}};
    if (t->fit_w1) j["fit_w1"] = {{"C", t->fit_w1->c}, {"p", t->fit_w1->p}};
  }
  return j.dump(2) + "\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw SolverError(ErrorCode::ConfigInvalid, "key '" + key + "' expects a number, got '" + v + "'");
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long d = std::stol(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw SolverError(ErrorCode::ConfigInvalid, "key '" + key + "' expects an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw SolverError(ErrorCode::ConfigInvalid, "key '" + key + "' expects a boolean, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, F&& conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(conv(item));
  }
  return out;
}

}  // namespace

ConfigMap read_config(std::istream& is) {
  ConfigMap m;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SolverError(ErrorCode::ConfigInvalid, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    m[key] = trim(line.substr(eq + 1));
  }
  return m;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SolverError(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
  return read_config(in);
}

void apply_config(ExperimentSpec& s, const ConfigMap& cfg) {
  double alpha = s.limiter.alpha;
  if (auto it = cfg.find("alpha"); it != cfg.end()) alpha = to_real("alpha", it->second);
  for (const auto& [key, v] : cfg) {
    if (key == "model" || key == "alpha" || key == "out_dir") {
      continue;
    } else if (key == "scheme") {
      s.scheme = parse_scheme(v);
    } else if (key == "cells") {
      s.n_cells = to_long(key, v);
    } else if (key == "tfinal" || key == "t_final") {
      s.t_final = to_real(key, v);
    } else if (key == "limiter") {
      s.limiter = parse_limiter(v, alpha);
    } else if (key == "cfl") {
      s.cfl = to_real(key, v);
    } else if (key == "k_mode" || key == "k") {
      s.k_mode = parse_k_mode(v);
    } else if (key == "tvni" || key == "tvni_mode") {
      s.tvni_mode = to_bool(key, v);
    } else if (key == "snapshots") {
      s.snapshots = to_list<double>(v, [&](const std::string& x) { return to_real(key, x); });
    } else if (key == "dt") {
      s.dt_fixed = to_real(key, v);
    } else if (key == "dt_max") {
      s.dt_max = to_real(key, v);
    } else if (key == "vmax") {
      s.vmax = to_real(key, v);
    } else if (key == "kernel_min_cells") {
      s.kernel_min_cells = to_real(key, v);
    } else if (key == "custom_flux") {
      s.custom_flux = v;
    } else if (key == "advection_speed") {
      s.advection_speed = to_real(key, v);
    } else if (key == "custom_initial") {
      s.custom_initial = v;
    } else if (key == "x_left") {
      s.x_left = to_real(key, v);
    } else if (key == "x_right") {
      s.x_right = to_real(key, v);
    } else if (key == "boundary") {
      if (v == "periodic") {
        s.boundary = Boundary::Periodic;
      } else if (v == "constant" || v == "constant_extension") {
        s.boundary = Boundary::ConstantExtension;
      } else {
        throw SolverError(ErrorCode::ConfigInvalid, "boundary must be periodic or constant_extension");
      }
    } else if (key == "seed") {
      s.seed = static_cast<unsigned>(to_long(key, v));
    } else if (key == "entropy_samples") {
      s.entropy_samples = static_cast<int>(to_long(key, v));
    } else if (key == "cells_list") {
      s.cell_counts = to_list<long>(v, [&](const std::string& x) { return to_long(key, x); });
    } else if (key == "reference_cells") {
      s.reference_cells = to_long(key, v);
    } else if (key == "max_steps") {
      s.max_steps = to_long(key, v);
    } else {
      throw SolverError(ErrorCode::ConfigInvalid, "unknown config key '" + key + "'");
    }
  }
  if (cfg.count("alpha") && s.limiter.type == LimiterType::MM3) s.limiter = LimiterKind::mm3(alpha);
}

}  // namespace noflow
