#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noflow/grid.hpp"
#include "noflow/lescheme.hpp"
#include "noflow/limiters.hpp"
#include "noflow/metrics.hpp"

namespace noflow {

enum class ModelKind { BurgersP1, BurgersP2, LwrBackward, LwrForward, KeyfitzKranzer, Custom };
enum class SchemeKind { Nsle, Godunov, Rusanov, LaxFriedrichs };

std::string to_string(ModelKind m);
std::string to_string(SchemeKind s);
ModelKind parse_model(const std::string& s);
SchemeKind parse_scheme(const std::string& s);
KShift parse_k_mode(const std::string& s);

struct ExperimentSpec {
  ModelKind model = ModelKind::BurgersP1;
  SchemeKind scheme = SchemeKind::Nsle;
  long n_cells = 512;
  double t_final = 0.25;
  LimiterKind limiter = LimiterKind::mm2();
  double cfl = 0.45;
  KShift k_mode = KShift::zero();
  bool tvni_mode = false;
  std::vector<double> snapshots;  // t_final is always added
  double dt_max = std::numeric_limits<double>::infinity();
  std::optional<double> dt_fixed;  // bypasses timestep control
  double vmax = 1.0;
  double kernel_min_cells = 8.0;
  // custom model: flux in {burgers, advection}, data in {sine, step, random}
  std::string custom_flux = "burgers";
  double advection_speed = 1.0;
  std::string custom_initial = "sine";
  double x_left = 0.0;
  double x_right = 1.0;
  Boundary boundary = Boundary::Periodic;
  unsigned seed = 1;
  int entropy_samples = 9;
  bool entropy_monitor = false;
  // sweep
  std::vector<long> cell_counts;
  long reference_cells = 0;
  long max_steps = 50'000'000;

  void validate() const;
  bool scalar() const { return model != ModelKind::KeyfitzKranzer; }
  bool nonlocal() const { return model == ModelKind::LwrBackward || model == ModelKind::LwrForward; }
  bool has_exact() const;
  Grid<double> grid(long cells) const;
};

struct Snapshot {
  double time = 0;
  std::vector<std::string> components;
  std::vector<CellField<double>> fields;
};

struct MonitorRow {
  long step = 0;
  double t = 0;
  double dt = 0;
  double mass = 0;
  double tv = 0;
  double umin = 0;
  double umax = 0;
  std::optional<double> entropy_residual;
  double boundary_inflow = 0;
  double widths_min = 0;
  double l1 = 0;
  double drift_scale = 0;  // sum |U| h before the step
};

struct RunArtifacts {
  ExperimentSpec spec;
  Grid<double> grid;
  std::vector<Snapshot> snapshots;
  std::vector<MonitorRow> monitors;
  Snapshot initial;
  double k_used = 0;
  double u0_min = 0;
  double u0_max = 0;
  double mass0 = 0;
  double l1_0 = 0;
  double tv0 = 0;
  double wall_seconds = 0;
  std::string version;

  const Snapshot& final_snapshot() const { return snapshots.back(); }
  // Component used for errors: u for scalar models, u1 for the system.
  const CellField<double>& error_field() const;
};

RunArtifacts run(const ExperimentSpec& spec);
ErrorTable sweep(const ExperimentSpec& spec, const std::vector<long>& cell_counts);

struct MonitorCheck {
  std::string name;
  bool applicable = true;
  bool pass = true;
  double value = 0;
  double tolerance = 0;
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorCheck> checks;
  std::optional<RunArtifacts> artifacts;
  bool all_pass() const;
};

MonitorReport monitor_suite(const ExperimentSpec& spec);

// Worker count for sweeps, from NOFLOW_THREADS when set.
unsigned sweep_threads();
std::string version_string();

// CSV and metadata output
std::string format_real(double v);
void write_solution_csv(std::ostream& os, const RunArtifacts& a);
void write_monitors_csv(std::ostream& os, const RunArtifacts& a);
void write_errors_csv(std::ostream& os, const ErrorTable& t);
void write_monitor_report_csv(std::ostream& os, const MonitorReport& r);
std::string metadata_json(const ExperimentSpec& spec, const RunArtifacts* a, const ErrorTable* t);

// Flat key = value configuration
using ConfigMap = std::map<std::string, std::string>;
ConfigMap read_config(std::istream& is);
ConfigMap read_config_file(const std::string& path);
void apply_config(ExperimentSpec& spec, const ConfigMap& cfg);
ExperimentSpec preset(ModelKind model);

}  // namespace noflow
