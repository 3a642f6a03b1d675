#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "noflow/experiment.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kMonitor = 3 };

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("-c,--config", o.config, "flat key = value config file");
  app->add_option("--out-dir", o.out_dir, "directory for CSV output");
  for (const char* name : {"model", "scheme", "cells", "tfinal", "limiter", "alpha", "cfl", "k-mode", "snapshots",
                           "dt", "dt-max", "tvni", "cells-list", "reference-cells", "kernel-min-cells"}) {
    std::string key = name;
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    app->add_option_function<std::string>(
        std::string("--") + name, [&o, key](const std::string& v) { o.flags[key] = v; }, key);
  }
  app->add_option("--set", o.sets, "extra key=value overrides");
}

noflow::ExperimentSpec build_spec(const Options& o) {
  noflow::ConfigMap cfg;
  if (!o.config.empty()) cfg = noflow::read_config_file(o.config);
  for (const auto& [k, v] : o.flags) cfg[k] = v;
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw noflow::SolverError(noflow::ErrorCode::ConfigInvalid, "--set expects key=value, got '" + kv + "'");
    }
    cfg[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  const auto it = cfg.find("model");
  noflow::ExperimentSpec spec = noflow::preset(it == cfg.end() ? noflow::ModelKind::BurgersP1
                                                               : noflow::parse_model(it->second));
  noflow::apply_config(spec, cfg);
  spec.validate();
  return spec;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(fs::path(dir) / name);
  if (!os) {
    throw noflow::SolverError(noflow::ErrorCode::ConfigInvalid, "cannot write " + (fs::path(dir) / name).string());
  }
  return os;
}

int cmd_run(const Options& o) {
  const noflow::ExperimentSpec spec = build_spec(o);
  const noflow::RunArtifacts a = noflow::run(spec);
  auto sol = open_out(o.out_dir, "solution.csv");
  noflow::write_solution_csv(sol, a);
  auto mon = open_out(o.out_dir, "monitors.csv");
  noflow::write_monitors_csv(mon, a);
  auto meta = open_out(o.out_dir, "metadata.json");
  meta << noflow::metadata_json(spec, &a, nullptr);
  std::cout << noflow::to_string(spec.model) << " " << noflow::to_string(spec.scheme) << " cells=" << spec.n_cells
            << " t=" << spec.t_final << " steps=" << a.monitors.size() << " k=" << a.k_used << "\n";
  return kOk;
}

int cmd_sweep(const Options& o) {
  const noflow::ExperimentSpec spec = build_spec(o);
  if (spec.cell_counts.empty()) {
    throw noflow::SolverError(noflow::ErrorCode::ConfigInvalid, "sweep needs --cells-list");
  }
  const noflow::ErrorTable t = noflow::sweep(spec, spec.cell_counts);
  auto err = open_out(o.out_dir, "errors.csv");
  noflow::write_errors_csv(err, t);
  auto meta = open_out(o.out_dir, "metadata.json");
  meta << noflow::metadata_json(spec, nullptr, &t);
  for (const noflow::ErrorRow& r : t.rows) {
    std::cout << r.cells << " h=" << r.h << " l1=" << r.l1;
    if (r.w1) std::cout << " w1=" << *r.w1;
    std::cout << "\n";
  }
  std::cout << "fit l1: C=" << t.fit_l1.c << " p=" << t.fit_l1.p << "\n";
  if (t.fit_w1) std::cout << "fit w1: C=" << t.fit_w1->c << " p=" << t.fit_w1->p << "\n";
  return kOk;
}

int cmd_monitor(const Options& o) {
  const noflow::ExperimentSpec spec = build_spec(o);
  const noflow::MonitorReport r = noflow::monitor_suite(spec);
  auto rep = open_out(o.out_dir, "monitor_report.csv");
  noflow::write_monitor_report_csv(rep, r);
  if (r.artifacts) {
    auto mon = open_out(o.out_dir, "monitors.csv");
    noflow::write_monitors_csv(mon, *r.artifacts);
  }
  for (const noflow::MonitorCheck& c : r.checks) {
    std::cout << (c.applicable ? (c.pass ? "PASS " : "FAIL ") : "n/a  ") << c.name << " value=" << c.value
              << " tol=" << c.tolerance << " " << c.detail << "\n";
  }
  return r.all_pass() ? kOk : kMonitor;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian-Eulerian solver experiments"};
  app.require_subcommand(1);
  Options run_o, sweep_o, mon_o;
  CLI::App* run = app.add_subcommand("run", "single run with snapshots and monitors");
  CLI::App* sweep = app.add_subcommand("sweep", "refinement sweep with error table and rate fit");
  CLI::App* mon = app.add_subcommand("monitor_suite", "run with monitors and report pass/fail");
  add_common(run, run_o);
  add_common(sweep, sweep_o);
  add_common(mon, mon_o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  try {
    if (*run) return cmd_run(run_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*mon) return cmd_monitor(mon_o);
  } catch (const noflow::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == noflow::ErrorCode::ConfigInvalid ? kConfig : kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  return kOk;
}
