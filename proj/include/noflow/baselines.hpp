#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "noflow/errors.hpp"
#include "noflow/flux_model.hpp"
#include "noflow/grid.hpp"

namespace noflow {

enum class BaselineKind { Godunov, Rusanov, LaxFriedrichs };

inline std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::Godunov: return "godunov";
    case BaselineKind::Rusanov: return "rusanov";
    case BaselineKind::LaxFriedrichs: return "lax_friedrichs";
  }
  return "godunov";
}

inline constexpr double kBaselineCfl = 0.9;

// Exact Riemann flux for a convex H.
template <typename Scalar>
Scalar godunov_flux(const FluxModel<Scalar>& model, Scalar ul, Scalar ur, Scalar x, Scalar t) {
  using std::max;
  using std::min;
  const Scalar hl = model.flux(ul, x, t);
  const Scalar hr = model.flux(ur, x, t);
  if (ul > ur) return max(hl, hr);
  if (const auto s = model.sonic_point(); s && *s > ul && *s < ur) return model.flux(*s, x, t);
  return min(hl, hr);
}

template <typename Scalar>
Scalar rusanov_flux(const FluxModel<Scalar>& model, Scalar ul, Scalar ur, Scalar x, Scalar t) {
  using std::abs;
  using std::max;
  const Scalar a = max(abs(model.flux_derivative(ul, x, t)), abs(model.flux_derivative(ur, x, t)));
  return Scalar(0.5) * (model.flux(ul, x, t) + model.flux(ur, x, t)) - Scalar(0.5) * a * (ur - ul);
}

template <typename Scalar>
Scalar lax_friedrichs_flux(const FluxModel<Scalar>& model, Scalar ul, Scalar ur, Scalar x, Scalar t,
                           Scalar h, Scalar dt) {
  return Scalar(0.5) * (model.flux(ul, x, t) + model.flux(ur, x, t)) - h / (Scalar(2) * dt) * (ur - ul);
}

template <typename Scalar>
Scalar baseline_flux(const FluxModel<Scalar>& model, BaselineKind kind, Scalar ul, Scalar ur, Scalar x,
                     Scalar t, Scalar h, Scalar dt) {
  switch (kind) {
    case BaselineKind::Godunov: return godunov_flux(model, ul, ur, x, t);
    case BaselineKind::Rusanov: return rusanov_flux(model, ul, ur, x, t);
    case BaselineKind::LaxFriedrichs: return lax_friedrichs_flux(model, ul, ur, x, t, h, dt);
  }
  return Scalar(0);
}

template <typename Scalar>
CellField<Scalar> baseline_step(const CellField<Scalar>& u, FluxModel<Scalar>& model, BaselineKind kind,
                                Scalar dt, Scalar t = Scalar(0), Scalar* inflow = nullptr) {
  if (kind == BaselineKind::Godunov && !model.convex()) {
    throw SolverError(ErrorCode::NonConvexFlux, "Godunov flux needs a convex model");
  }
  model.pre_step(u, t);
  const Index n = u.size();
  const Scalar h = u.grid.h();
  const ArrayX<Scalar> p = padded(u, 1);
  ArrayX<Scalar> flux(n + 1);
  for (Index e = 0; e <= n; ++e) {
    flux[e] = baseline_flux(model, kind, p[e], p[e + 1], u.grid.edge(e), t, h, dt);
  }
  if (inflow) *inflow = (flux[0] - flux[n]) * dt;
  CellField<Scalar> out(u.grid);
  out.values = u.values - dt / h * (flux.tail(n) - flux.head(n));
  return out;
}

// Timestep with dt max|H'| = safety h over the invariant range.
template <typename Scalar>
Scalar baseline_dt(const FluxModel<Scalar>& model, Scalar lo, Scalar hi, Scalar h,
                   Scalar safety = Scalar(kBaselineCfl)) {
  const Scalar b = model.derivative_bounds(lo, hi).flux_term;
  return b > Scalar(0) ? safety * h / b : std::numeric_limits<Scalar>::infinity();
}

}  // namespace noflow
