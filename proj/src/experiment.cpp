#include "noflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <thread>
#include <tuple>

#include "noflow/baselines.hpp"
#include "noflow/models.hpp"
#include "noflow/quadrature.hpp"

#ifndef NOFLOW_VERSION
#define NOFLOW_VERSION "unknown"
#endif

namespace noflow {

std::string version_string() { return std::string("noflow ") + NOFLOW_VERSION; }

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::BurgersP1: return "burgers_p1";
    case ModelKind::BurgersP2: return "burgers_p2";
    case ModelKind::LwrBackward: return "lwr_backward";
    case ModelKind::LwrForward: return "lwr_forward";
    case ModelKind::KeyfitzKranzer: return "keyfitz_kranzer";
    case ModelKind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::Nsle: return "nsle";
    case SchemeKind::Godunov: return "godunov";
    case SchemeKind::Rusanov: return "rusanov";
    case SchemeKind::LaxFriedrichs: return "lax_friedrichs";
  }
  return "nsle";
}

ModelKind parse_model(const std::string& s) {
  for (ModelKind m : {ModelKind::BurgersP1, ModelKind::BurgersP2, ModelKind::LwrBackward,
                      ModelKind::LwrForward, ModelKind::KeyfitzKranzer, ModelKind::Custom}) {
    if (to_string(m) == s) return m;
  }
  throw SolverError(ErrorCode::ConfigInvalid, "unknown model '" + s + "'");
}

SchemeKind parse_scheme(const std::string& s) {
  for (SchemeKind k : {SchemeKind::Nsle, SchemeKind::Godunov, SchemeKind::Rusanov, SchemeKind::LaxFriedrichs}) {
    if (to_string(k) == s) return k;
  }
  if (s == "lf") return SchemeKind::LaxFriedrichs;
  throw SolverError(ErrorCode::ConfigInvalid, "unknown scheme '" + s + "'");
}

KShift parse_k_mode(const std::string& s) {
  if (s == "zero") return KShift::zero();
  if (s == "auto") return KShift::automatic();
  try {
    size_t used = 0;
    const double k = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return KShift::fixed(k);
  } catch (const std::logic_error&) {
    throw SolverError(ErrorCode::ConfigInvalid, "k mode must be zero, auto or a number, got '" + s + "'");
  }
}

bool ExperimentSpec::has_exact() const {
  if (model == ModelKind::BurgersP1 || model == ModelKind::BurgersP2) return true;
  return model == ModelKind::Custom && custom_flux == "advection" && custom_initial != "random";
}

Grid<double> ExperimentSpec::grid(long cells) const { return Grid<double>(x_left, x_right, cells, boundary); }

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& why) { throw SolverError(ErrorCode::ConfigInvalid, why); };
  if (!(t_final > 0.0) || !std::isfinite(t_final)) fail("t_final must be positive");
  if (n_cells < 16) fail("n_cells must be at least 16");
  if (!(cfl > 0.0 && cfl <= 0.5)) fail("cfl must lie in (0, 0.5]");
  if (scheme != SchemeKind::Nsle && !scalar()) fail("baseline schemes need a scalar model");
  if (scheme != SchemeKind::Nsle && nonlocal()) fail("baseline schemes are only wired for local models");
  if (!(x_right > x_left)) fail("x_right must exceed x_left");
  if (dt_fixed && !(*dt_fixed > 0.0)) fail("dt must be positive");
  if (!(dt_max > 0.0)) fail("dt_max must be positive");
  if (!(vmax > 0.0)) fail("vmax must be positive");
  if (model == ModelKind::Custom) {
    if (custom_flux != "burgers" && custom_flux != "advection") fail("custom_flux must be burgers or advection");
    if (custom_initial != "sine" && custom_initial != "step" && custom_initial != "random") {
      fail("custom_initial must be sine, step or random");
    }
  }
  for (double s : snapshots) {
    if (!(s >= 0.0 && s <= t_final)) fail("snapshot times must lie in [0, t_final]");
  }
  for (long c : cell_counts) {
    if (c < 16) fail("sweep cell counts must be at least 16");
  }
  if (entropy_samples < 1) fail("entropy_samples must be positive");
}

ExperimentSpec preset(ModelKind model) {
  ExperimentSpec s;
  s.model = model;
  switch (model) {
    case ModelKind::BurgersP1:
      s.x_left = 0.0, s.x_right = 1.0, s.boundary = Boundary::ConstantExtension, s.t_final = 0.25;
      break;
    case ModelKind::BurgersP2:
      s.x_left = -1.0, s.x_right = 1.0, s.boundary = Boundary::ConstantExtension, s.t_final = 0.5;
      break;
    case ModelKind::LwrBackward:
    case ModelKind::LwrForward:
      s.x_left = -5.0, s.x_right = 5.0, s.boundary = Boundary::ConstantExtension, s.t_final = 0.5;
      s.k_mode = KShift::automatic();
      break;
    case ModelKind::KeyfitzKranzer:
      s.x_left = -1.0, s.x_right = 1.0, s.boundary = Boundary::Periodic, s.t_final = 0.5;
      break;
    case ModelKind::Custom:
      s.x_left = 0.0, s.x_right = 1.0, s.boundary = Boundary::Periodic, s.t_final = 0.5;
      break;
  }
  return s;
}

const CellField<double>& RunArtifacts::error_field() const {
  const Snapshot& s = final_snapshot();
  return s.fields.size() > 1 ? s.fields[1] : s.fields[0];
}

namespace {

struct Setup {
  std::unique_ptr<FluxModel<double>> model;
  std::vector<std::string> components;
  std::vector<CellField<double>> fields;
  double lo = 0;
  double hi = 0;
};

double custom_initial_value(const ExperimentSpec& s, double x) {
  const double xi = (x - s.x_left) / (s.x_right - s.x_left);
  if (s.custom_initial == "sine") return std::sin(2.0 * std::numbers::pi * xi);
  return xi >= 0.25 && xi <= 0.75 ? 1.0 : 0.0;
}

Setup make_setup(const ExperimentSpec& s, long cells) {
  const Grid<double> g = s.grid(cells);
  Setup st;
  switch (s.model) {
    case ModelKind::BurgersP1:
    case ModelKind::BurgersP2: {
      auto m = std::make_unique<Burgers<double>>(s.model == ModelKind::BurgersP1 ? BurgersProblem::P1
                                                                                  : BurgersProblem::P2);
      st.fields.emplace_back(g, cell_averages<double>(g, [&](double x) { return *m->exact(x, 0.0); },
                                                      m->breakpoints(0.0)));
      st.model = std::move(m);
      st.components = {"u"};
      break;
    }
    case ModelKind::LwrBackward:
    case ModelKind::LwrForward: {
      const bool back = s.model == ModelKind::LwrBackward;
      st.model = std::make_unique<LwrNonlocal<double>>(back ? 0.25 : 0.0, back ? 0.0 : 0.25, s.vmax, g,
                                                       s.kernel_min_cells);
      st.fields.emplace_back(g, cell_averages<double>(g, lwr_initial_density<double>,
                                                      lwr_initial_breakpoints<double>()));
      st.components = {"rho"};
      break;
    }
    case ModelKind::KeyfitzKranzer: {
      KKState<double> k = kk_initial(g);
      st.model = std::make_unique<KeyfitzKranzerRadius<double>>();
      st.fields = {k.r, k.u1, k.u2};
      st.components = {"r", "u1", "u2"};
      break;
    }
    case ModelKind::Custom: {
      if (s.custom_flux == "burgers") {
        st.model = std::make_unique<Burgers<double>>();
      } else {
        st.model = std::make_unique<LinearAdvection<double>>(s.advection_speed);
      }
      if (s.custom_initial == "random") {
        std::mt19937_64 rng(s.seed);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        ArrayX<double> v(cells);
        for (long j = 0; j < cells; ++j) v[j] = dist(rng);
        st.fields.emplace_back(g, v);
      } else {
        const double xl = s.x_left, len = s.x_right - s.x_left;
        std::vector<double> breaks;
        if (s.custom_initial == "step") breaks = {xl + 0.25 * len, xl + 0.75 * len};
        st.fields.emplace_back(g, cell_averages<double>(g, [&](double x) { return custom_initial_value(s, x); },
                                                        breaks));
      }
      st.components = {"u"};
      break;
    }
  }
  const CellField<double>& u0 = st.fields[0];
  st.lo = u0.min();
  st.hi = u0.max();
  if (s.nonlocal()) st.lo = std::min(st.lo, 0.0), st.hi = std::max(st.hi, 1.0);
  return st;
}

// Exact solution of a custom advection run.
double advected(const ExperimentSpec& s, double x, double t) {
  const double len = s.x_right - s.x_left;
  double y = std::fmod(x - s.advection_speed * t - s.x_left, len);
  if (y < 0) y += len;
  return custom_initial_value(s, s.x_left + y);
}

std::vector<double> advected_breaks(const ExperimentSpec& s, double t) {
  if (s.custom_initial != "step") return {};
  const double len = s.x_right - s.x_left;
  std::vector<double> b;
  for (double f : {0.25, 0.75}) {
    double y = std::fmod(f * len + s.advection_speed * t, len);
    if (y < 0) y += len;
    b.push_back(s.x_left + y);
  }
  return b;
}

std::vector<double> target_times(const ExperimentSpec& s) {
  std::vector<double> t = s.snapshots;
  t.push_back(s.t_final);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

Snapshot snapshot(double t, const Setup& st) { return {t, st.components, st.fields}; }

}  // namespace

RunArtifacts run(const ExperimentSpec& spec) {
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();
  Setup st = make_setup(spec, spec.n_cells);
  FluxModel<double>& model = *st.model;
  const Grid<double> grid = spec.grid(spec.n_cells);
  const double h = grid.h();
  const Index n = grid.n_cells;

  SchemeConfig<double> cfg;
  cfg.limiter = spec.limiter;
  cfg.cfl_number = spec.cfl;
  cfg.k_shift = spec.k_mode;
  cfg.tvni_mode = spec.tvni_mode;
  cfg.dt_max = spec.dt_max;
  cfg = resolve(cfg, model, st.lo, st.hi);

  RunArtifacts a;
  a.spec = spec;
  a.grid = grid;
  a.version = version_string();
  a.k_used = cfg.k();
  a.u0_min = st.lo;
  a.u0_max = st.hi;
  a.initial = snapshot(0.0, st);
  a.mass0 = st.fields[0].mass();
  a.l1_0 = l1_norm(st.fields[0]);
  a.tv0 = tv_eps(st.fields[0]);

  const bool system = !spec.scalar();
  const bool entropy = spec.entropy_monitor && spec.scalar() && !spec.nonlocal() &&
                       spec.scheme == SchemeKind::Nsle;
  std::vector<double> levels;
  for (int i = 0; i < spec.entropy_samples; ++i) {
    levels.push_back(spec.entropy_samples == 1 ? 0.5 * (st.lo + st.hi)
                                               : st.lo + (st.hi - st.lo) * i / (spec.entropy_samples - 1));
  }
  const double baseline_step_dt =
      spec.scheme == SchemeKind::Nsle ? 0.0 : baseline_dt(model, st.lo, st.hi, h);
  const BaselineKind bkind = spec.scheme == SchemeKind::Godunov   ? BaselineKind::Godunov
                             : spec.scheme == SchemeKind::Rusanov ? BaselineKind::Rusanov
                                                                  : BaselineKind::LaxFriedrichs;

  double t = 0.0;
  long step = 0;
  for (double target : target_times(spec)) {
    while (t < target) {
      if (step >= spec.max_steps) throw SolverError(ErrorCode::ConfigInvalid, "max_steps exceeded");
      MonitorRow row;
      row.drift_scale = l1_norm(st.fields[0]);
      row.step = step + 1;
      double dt = 0.0;
      if (spec.scheme == SchemeKind::Nsle) {
        EdgeData<double> edges;
        if (system) {
          KKState<double> kk{st.fields[0], st.fields[1], st.fields[2]};
          edges = kk_edges(kk, cfg.limiter);
        } else {
          model.pre_step(st.fields[0], t);
          edges = noflow_slopes(st.fields[0], model, cfg.limiter, t);
        }
        dt = spec.dt_fixed ? *spec.dt_fixed : select_dt(edges.slopes, h, cfg);
        if (!(dt > 0.0) || !std::isfinite(dt)) dt = target - t;
        const bool last = t + dt >= target - 1e-12 * std::max(1.0, target);
        if (last) dt = target - t;
        if (system) {
          KKState<double> kk{st.fields[0], st.fields[1], st.fields[2]};
          KKStepOutcome<double> o = kk_step(kk, cfg, dt, &edges);
          st.fields = {o.state.r, o.state.u1, o.state.u2};
          row.widths_min = o.report.new_widths_min;
          row.boundary_inflow = o.report.boundary_inflow;
        } else {
          const CellField<double> old = st.fields[0];
          Advance<double> adv = advance_with_edges(old, edges, dt, cfg.k());
          st.fields[0] = CellField<double>(grid, std::move(adv.values));
          row.widths_min = adv.widths_min;
          row.boundary_inflow = adv.boundary_inflow;
          if (entropy) {
            const double k = cfg.k();
            ArrayX<double> fp(n + 1), fm(n + 1);
            for (Index e = 0; e <= n; ++e) std::tie(fp[e], fm[e]) = split_flux(edges.slope(e), k);
            double worst = -std::numeric_limits<double>::infinity();
            for (double lvl : levels) {
              const auto [ap, am] = split_flux(model.slope(lvl, 0.0, t), k);
              worst = std::max(worst, kruzhkov_residual(old, st.fields[0], fp, fm, lvl, ap, am, h, dt));
            }
            row.entropy_residual = worst;
          }
        }
        t = last ? target : t + dt;
      } else {
        dt = spec.dt_fixed ? *spec.dt_fixed : std::min(baseline_step_dt, spec.dt_max);
        const bool last = t + dt >= target - 1e-12 * std::max(1.0, target);
        if (last) dt = target - t;
        double inflow = 0.0;
        st.fields[0] = baseline_step(st.fields[0], model, bkind, dt, t, &inflow);
        row.boundary_inflow = inflow;
        row.widths_min = h;
        t = last ? target : t + dt;
      }
      ++step;
      const CellField<double>& u = st.fields[0];
      row.t = t;
      row.dt = dt;
      row.mass = u.mass();
      row.tv = tv_eps(u);
      row.umin = u.min();
      row.umax = u.max();
      row.l1 = l1_norm(u);
      a.monitors.push_back(row);
    }
    a.snapshots.push_back(snapshot(target, st));
  }
  a.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return a;
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NOFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return n;
}

ErrorTable sweep(const ExperimentSpec& spec, const std::vector<long>& cell_counts) {
  spec.validate();
  if (cell_counts.empty()) throw SolverError(ErrorCode::ConfigInvalid, "sweep needs cell counts");
  const bool exact = spec.has_exact();
  if (!exact && spec.reference_cells <= 0) {
    throw SolverError(ErrorCode::ConfigInvalid, "this model needs reference_cells for a self-reference");
  }
  for (long c : cell_counts) {
    if (!exact && spec.reference_cells % c != 0) {
      throw SolverError(ErrorCode::IncompatibleGrids, "reference_cells must be a multiple of every cell count");
    }
  }
  std::vector<long> jobs = cell_counts;
  if (!exact) jobs.push_back(spec.reference_cells);
  // Largest first so the long runs start early.
  std::vector<size_t> order(jobs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return jobs[a] > jobs[b]; });

  std::vector<std::optional<CellField<double>>> finals(jobs.size());
  const unsigned workers = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(jobs.size()));
  std::vector<std::future<void>> pool;
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&, w] {
      try {
        for (size_t i = next++; i < jobs.size(); i = next++) {
          ExperimentSpec s = spec;
          s.n_cells = jobs[order[i]];
          s.snapshots.clear();
          finals[order[i]] = run(s).error_field();
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next = jobs.size();
      }
    }));
  }
  for (auto& f : pool) f.get();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const bool burgers = spec.model == ModelKind::BurgersP1 || spec.model == ModelKind::BurgersP2 ||
                       (spec.model == ModelKind::Custom);
  ErrorTable table;
  for (size_t i = 0; i < cell_counts.size(); ++i) {
    const CellField<double>& u = *finals[i];
    ErrorRow row;
    row.cells = cell_counts[i];
    row.h = u.grid.h();
    if (exact) {
      std::function<double(double)> ref;
      std::vector<double> breaks;
      if (spec.model == ModelKind::Custom) {
        ref = [&](double x) { return advected(spec, x, spec.t_final); };
        breaks = advected_breaks(spec, spec.t_final);
      } else {
        auto m = std::make_shared<Burgers<double>>(spec.model == ModelKind::BurgersP1 ? BurgersProblem::P1
                                                                                       : BurgersProblem::P2);
        ref = [m, &spec](double x) { return *m->exact(x, spec.t_final); };
        breaks = m->breakpoints(spec.t_final);
      }
      const CellField<double> avg(u.grid, cell_averages<double>(u.grid, ref, breaks));
      row.l1 = l1_error(u, avg);
      if (burgers) row.w1 = w1_error(u, avg);
    } else {
      const CellField<double>& ref = *finals.back();
      row.l1 = l1_error(u, ref);
      if (burgers) row.w1 = w1_error(u, ref);
    }
    table.rows.push_back(row);
  }
  table.refit();
  return table;
}

bool MonitorReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const MonitorCheck& c) { return !c.applicable || c.pass; });
}

MonitorReport monitor_suite(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  const bool auto_k = spec.k_mode.mode == KShiftMode::Auto;
  spec.entropy_monitor = auto_k;
  MonitorReport rep;
  RunArtifacts a;
  try {
    a = run(spec);
  } catch (const SolverError& e) {
    rep.checks.push_back({"solver", true, false, 0.0, 0.0, e.what()});
    return rep;
  }
  rep.checks.push_back({"solver", true, true, 0.0, 0.0, "completed " + std::to_string(a.monitors.size()) + " steps"});

  const double eps = std::numeric_limits<double>::epsilon();
  const double n = static_cast<double>(a.grid.n_cells);

  MonitorCheck cons{"conservation", true, true, 0.0, 10.0 * eps * n, "per-step mass change minus boundary inflow"};
  double prev = a.mass0;
  double worst_rel = 0.0;
  for (const MonitorRow& r : a.monitors) {
    const double drift = std::abs(r.mass - prev - r.boundary_inflow) / std::max(1.0, r.drift_scale);
    worst_rel = std::max(worst_rel, drift);
    prev = r.mass;
  }
  cons.value = worst_rel;
  cons.pass = worst_rel <= cons.tolerance;
  rep.checks.push_back(cons);

  const double mp_tol = spec.nonlocal() ? 1e-8 : 1e-12;
  MonitorCheck mp{"max_principle", true, true, 0.0, mp_tol, ""};
  double excess = 0.0;
  for (const MonitorRow& r : a.monitors) {
    excess = std::max({excess, a.u0_min - r.umin, r.umax - a.u0_max});
  }
  mp.value = excess;
  mp.pass = excess <= mp_tol;
  mp.detail = "range [" + format_real(a.u0_min) + ", " + format_real(a.u0_max) + "]";
  if (!spec.scalar()) mp.applicable = false, mp.detail = "system: not a scalar bound";
  rep.checks.push_back(mp);

  MonitorCheck tv{"tvni", spec.tvni_mode, true, 0.0, 1e-12, "largest per-step TV increase"};
  double tv_prev = a.tv0;
  double tv_up = -std::numeric_limits<double>::infinity();
  for (const MonitorRow& r : a.monitors) {
    tv_up = std::max(tv_up, r.tv - tv_prev);
    tv_prev = r.tv;
  }
  tv.value = tv_up;
  tv.pass = tv_up <= tv.tolerance;
  if (!spec.tvni_mode) tv.detail = "tvni_mode off";
  rep.checks.push_back(tv);

  const bool nonneg = a.u0_min >= 0.0 && a.grid.boundary == Boundary::Periodic && spec.scalar();
  MonitorCheck l1{"l1_stability", nonneg, true, 0.0, 1e-12, "max ||U^n||_1 - ||U^0||_1"};
  double l1_up = -std::numeric_limits<double>::infinity();
  for (const MonitorRow& r : a.monitors) l1_up = std::max(l1_up, r.l1 - a.l1_0);
  l1.value = l1_up;
  l1.pass = l1_up <= l1.tolerance * std::max(1.0, a.l1_0);
  if (!nonneg) l1.detail = "needs nonnegative periodic scalar data";
  rep.checks.push_back(l1);

  const bool entropy_ok = auto_k && spec.scalar() && !spec.nonlocal() && spec.scheme == SchemeKind::Nsle;
  MonitorCheck en{"entropy", entropy_ok, true, 0.0, 1e-10, "max Kruzhkov residual over cells, steps, levels"};
  double worst = -std::numeric_limits<double>::infinity();
  for (const MonitorRow& r : a.monitors) {
    if (r.entropy_residual) worst = std::max(worst, *r.entropy_residual);
  }
  en.value = worst;
  en.pass = worst <= en.tolerance;
  if (!entropy_ok) en.detail = "needs auto k on a local scalar model";
  rep.checks.push_back(en);

  if (!spec.scalar()) {
    const Snapshot& f = a.final_snapshot();
    KKState<double> kk{f.fields[0], f.fields[1], f.fields[2]};
    rep.checks.push_back({"radius_drift", true, true, kk.radius_drift(), 0.0, "reported, not enforced"});
  }
  rep.artifacts = std::move(a);
  return rep;
}

}  // namespace noflow
