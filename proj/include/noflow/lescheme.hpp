#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "noflow/errors.hpp"
#include "noflow/flux_model.hpp"
#include "noflow/grid.hpp"
#include "noflow/limiters.hpp"
#include "noflow/metrics.hpp"

namespace noflow {

enum class KShiftMode { Zero, Fixed, Auto };

struct KShift {
  KShiftMode mode = KShiftMode::Zero;
  double value = 0.0;  // Fixed: the shift; Auto: filled in by resolve()
  bool resolved = false;

  static KShift zero() { return {KShiftMode::Zero, 0.0, true}; }
  static KShift fixed(double k) {
    if (!(k >= 0.0)) throw SolverError(ErrorCode::ConfigInvalid, "k shift must be >= 0");
    return {KShiftMode::Fixed, k, true};
  }
  static KShift automatic() { return {KShiftMode::Auto, 0.0, false}; }
};

template <typename Scalar>
struct SchemeConfig {
  LimiterKind limiter = LimiterKind::mm2();
  Scalar cfl_number = Scalar(0.45);
  KShift k_shift = KShift::zero();
  bool tvni_mode = false;
  Scalar dt_max = std::numeric_limits<Scalar>::infinity();
  // max |(u f)'| over the invariant range; required by tvni_mode.
  std::optional<Scalar> flux_derivative_bound;

  void validate() const {
    if (!(cfl_number > Scalar(0) && cfl_number <= Scalar(0.5))) {
      throw SolverError(ErrorCode::ConfigInvalid, "cfl_number must lie in (0, 0.5]");
    }
    if (!(dt_max > Scalar(0))) throw SolverError(ErrorCode::ConfigInvalid, "dt_max must be positive");
  }

  Scalar k() const {
    if (k_shift.mode == KShiftMode::Zero) return Scalar(0);
    if (!k_shift.resolved) {
      throw SolverError(ErrorCode::ConfigInvalid, "automatic k shift used before resolve()");
    }
    return Scalar(k_shift.value);
  }
};

template <typename Scalar>
struct StepReport {
  Scalar dt_used = 0;
  Scalar mass = 0;
  Scalar tv_eps = 0;
  Scalar u_min = 0;
  Scalar u_max = 0;
  std::optional<Scalar> max_entropy_residual;
  Scalar new_widths_min = 0;
  // Mass that entered through the two domain ends during the step.
  Scalar boundary_inflow = 0;
};

// Reconstructed states and no-flow slopes on edges -1 .. n+1, where edge e
// separates cells e-1 and e.
template <typename Scalar>
struct EdgeData {
  ArrayX<Scalar> states;
  ArrayX<Scalar> slopes;

  static constexpr Index first = -1;
  Index size() const { return slopes.size(); }
  Scalar state(Index e) const { return states[e - first]; }
  Scalar slope(Index e) const { return slopes[e - first]; }
  // Interior edges 0 .. n.
  ArrayX<Scalar> interior_slopes() const { return slopes.segment(1, slopes.size() - 2); }
};

template <typename Scalar>
std::pair<Scalar, Scalar> split_flux(Scalar f, Scalar k) {
  using std::max;
  return {max(f, Scalar(0)) + k, max(-f, Scalar(0)) + k};
}

template <typename Scalar>
EdgeData<Scalar> noflow_slopes(const CellField<Scalar>& u, const FluxModel<Scalar>& model,
                               const LimiterKind& limiter, Scalar t = Scalar(0)) {
  const Index n = u.size();
  const Index g = kGhosts;
  const ArrayX<Scalar> p = padded(u, g);
  // Slopes for cells -2 .. n+1.
  ArrayX<Scalar> s(n + 4);
  for (Index c = -2; c <= n + 1; ++c) {
    const Index i = c + g;
    s[c + 2] = slope<Scalar>(limiter, {p[i - 2], p[i - 1], p[i], p[i + 1], p[i + 2]});
  }
  EdgeData<Scalar> ed;
  ed.states.resize(n + 3);
  ed.slopes.resize(n + 3);
  for (Index e = -1; e <= n + 1; ++e) {
    const Scalar ul = p[e - 1 + g];
    const Scalar ur = p[e + g];
    const Scalar ue = Scalar(0.5) * (ul + ur) + Scalar(0.125) * (s[e + 2] - s[e + 1]);
    const Scalar f = model.slope(ue, u.grid.edge(e), t);
    if (!std::isfinite(static_cast<double>(f))) {
      throw SolverError(ErrorCode::NonFiniteSlope, "model slope is not finite at an edge");
    }
    ed.states[e + 1] = ue;
    ed.slopes[e + 1] = f;
  }
  return ed;
}

// Widths of the moved cells between consecutive edges.
template <typename Scalar>
ArrayX<Scalar> evolve_widths(const ArrayX<Scalar>& f_edges, Scalar h, Scalar dt) {
  const Index m = f_edges.size() - 1;
  ArrayX<Scalar> w = h + (f_edges.tail(m) - f_edges.head(m)) * dt;
  if ((w < h / Scalar(4)).any()) {
    throw SolverError(ErrorCode::DegenerateCell, "moved cell width fell below h/4");
  }
  return w;
}

template <typename Scalar>
ArrayX<Scalar> conserve(const ArrayX<Scalar>& u, const ArrayX<Scalar>& widths, Scalar h) {
  if ((widths <= Scalar(0)).any()) {
    throw SolverError(ErrorCode::DegenerateCell, "non-positive moved cell width");
  }
  return h * u / widths;
}

// Projects moved-mesh averages ubar (m cells) back onto the fixed grid using
// the m+1 edge slopes around them; returns the m-2 inner cells.
template <typename Scalar>
ArrayX<Scalar> project(const ArrayX<Scalar>& ubar, const ArrayX<Scalar>& f_edges, Scalar h,
                       Scalar dt, Scalar k = Scalar(0)) {
  const Index m = ubar.size();
  ArrayX<Scalar> out(m - 2);
  for (Index i = 1; i + 1 < m; ++i) {
    const Scalar cm = split_flux(f_edges[i], k).first * dt;
    const Scalar cp = split_flux(f_edges[i + 1], k).second * dt;
    const Scalar c0 = h - cm - cp;
    if (c0 < Scalar(0)) {
      throw SolverError(ErrorCode::NegativeCoefficient, "projection weight c0 < 0; dt too large for k");
    }
    out[i - 1] = (cm * ubar[i - 1] + c0 * ubar[i] + cp * ubar[i + 1]) / h;
  }
  return out;
}

template <typename Scalar>
struct Advance {
  ArrayX<Scalar> values;
  Scalar widths_min = 0;
  Scalar boundary_inflow = 0;
};

// One step of moved-mesh conservation and projection, given edge slopes.
template <typename Scalar>
Advance<Scalar> advance_with_edges(const CellField<Scalar>& u, const EdgeData<Scalar>& edges,
                                   Scalar dt, Scalar k) {
  const Index n = u.size();
  const Scalar h = u.grid.h();
  const ArrayX<Scalar> p = padded(u, kGhosts);
  const ArrayX<Scalar> widths = evolve_widths<Scalar>(edges.slopes, h, dt);  // cells -1 .. n
  const ArrayX<Scalar> ubar = conserve<Scalar>(p.segment(kGhosts - 1, n + 2), widths, h);
  Advance<Scalar> a;
  a.values = project<Scalar>(ubar, edges.slopes, h, dt, k);
  a.widths_min = widths.segment(1, n).minCoeff();
  auto through = [&](Index e) {
    const auto [fp, fm] = split_flux(edges.slope(e), k);
    return (fp * ubar[e] - fm * ubar[e + 1]) * dt;
  };
  a.boundary_inflow = through(0) - through(n);
  return a;
}

template <typename Scalar>
struct StepOutcome {
  CellField<Scalar> u;
  StepReport<Scalar> report;
  EdgeData<Scalar> edges;
};

template <typename Scalar>
StepReport<Scalar> describe(const CellField<Scalar>& u) {
  StepReport<Scalar> r;
  r.mass = u.mass();
  r.tv_eps = tv_eps(u);
  r.u_min = u.min();
  r.u_max = u.max();
  return r;
}

template <typename Scalar>
StepOutcome<Scalar> nsle_step(const CellField<Scalar>& u, FluxModel<Scalar>& model,
                              const SchemeConfig<Scalar>& cfg, Scalar dt, Scalar t = Scalar(0)) {
  model.pre_step(u, t);
  StepOutcome<Scalar> out;
  out.edges = noflow_slopes(u, model, cfg.limiter, t);
  Advance<Scalar> a = advance_with_edges(u, out.edges, dt, cfg.k());
  out.u = CellField<Scalar>(u.grid, std::move(a.values));
  out.report = describe(out.u);
  out.report.dt_used = dt;
  out.report.new_widths_min = a.widths_min;
  out.report.boundary_inflow = a.boundary_inflow;
  return out;
}

template <typename Scalar>
Scalar select_dt(const ArrayX<Scalar>& f_edges, Scalar h, const SchemeConfig<Scalar>& cfg,
                 std::optional<Scalar> model_bound = std::nullopt) {
  using std::min;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar k = cfg.k();
  Scalar dt = cfg.dt_max;
  const Scalar fmax = f_edges.abs().maxCoeff();
  if (fmax > Scalar(0)) dt = min(dt, cfg.cfl_number * h / fmax);
  // Keep c0 >= 0 when the shift widens the stencil.
  Scalar spread = 0;
  for (Index i = 0; i + 1 < f_edges.size(); ++i) {
    spread = std::max(spread, split_flux(f_edges[i], k).first + split_flux(f_edges[i + 1], k).second);
  }
  if (spread > Scalar(0)) dt = min(dt, Scalar(2) * cfg.cfl_number * h / spread);
  if (cfg.tvni_mode) {
    const std::optional<Scalar> b = model_bound ? model_bound : cfg.flux_derivative_bound;
    if (!b) throw SolverError(ErrorCode::ConfigInvalid, "tvni_mode needs a flux derivative bound");
    const Scalar denom = Scalar(2) * k + Scalar(4 * cfg.limiter.variation_bound()) * *b;
    if (denom > Scalar(0)) dt = min(dt, h / denom);
  }
  return dt == inf ? cfg.dt_max : dt;
}

template <typename Scalar>
Scalar auto_k(const FluxModel<Scalar>& model, Scalar lo, Scalar hi,
              const LimiterKind& limiter = LimiterKind::mm2(), Scalar safety = Scalar(kBoundSafety)) {
  return model.derivative_bounds(lo, hi, safety).slope_term * Scalar(limiter.variation_bound());
}

// Fills in the automatic shift and the TVNI bound from the invariant range.
template <typename Scalar>
SchemeConfig<Scalar> resolve(SchemeConfig<Scalar> cfg, const FluxModel<Scalar>& model, Scalar lo,
                             Scalar hi) {
  cfg.validate();
  if (cfg.k_shift.mode == KShiftMode::Auto) {
    cfg.k_shift.value = static_cast<double>(auto_k(model, lo, hi, cfg.limiter));
    cfg.k_shift.resolved = true;
  }
  if (cfg.tvni_mode && !cfg.flux_derivative_bound) {
    cfg.flux_derivative_bound = model.derivative_bounds(lo, hi).flux_term;
  }
  return cfg;
}

template <typename Scalar>
CellField<Scalar> semidiscrete_rhs(const CellField<Scalar>& u, FluxModel<Scalar>& model,
                                   const LimiterKind& limiter, Scalar k = Scalar(0),
                                   Scalar t = Scalar(0)) {
  model.pre_step(u, t);
  const EdgeData<Scalar> ed = noflow_slopes(u, model, limiter, t);
  const Index n = u.size();
  const Scalar h = u.grid.h();
  const ArrayX<Scalar> p = padded(u, 1);
  ArrayX<Scalar> r(n);
  for (Index j = 0; j < n; ++j) {
    const auto [lp, lm] = split_flux(ed.slope(j), k);
    const auto [rp, rm] = split_flux(ed.slope(j + 1), k);
    r[j] = (p[j] * lp - p[j + 1] * lm - p[j + 1] * rp + p[j + 2] * rm) / h;
  }
  CellField<Scalar> out(u.grid);
  out.values = r;
  return out;
}

}  // namespace noflow
