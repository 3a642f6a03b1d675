#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noflow/errors.hpp"
#include "noflow/flux_model.hpp"
#include "noflow/grid.hpp"
#include "noflow/lescheme.hpp"
#include "noflow/quadrature.hpp"

namespace noflow {

// f = a for every state.
template <typename Scalar>
class LinearAdvection : public FluxModel<Scalar> {
 public:
  explicit LinearAdvection(Scalar speed) : a_(speed) {}

  std::string name() const override { return "linear_advection"; }
  Scalar flux(Scalar u, Scalar, Scalar) const override { return a_ * u; }
  Scalar slope(Scalar, Scalar, Scalar) const override { return a_; }
  Scalar slope_derivative(Scalar, Scalar, Scalar) const override { return Scalar(0); }
  Scalar flux_derivative(Scalar, Scalar, Scalar) const override { return a_; }
  bool convex() const override { return true; }

 private:
  Scalar a_;
};

enum class BurgersProblem { None, P1, P2 };

// H = u^2 / 2. P1 is the double jump 2 | 1 | 0 at x = 1/4 and 1/2 whose two
// shocks merge at t = 1/4; P2 is the sonic rarefaction -1 | 1 at x = 0.
template <typename Scalar>
class Burgers : public FluxModel<Scalar> {
 public:
  explicit Burgers(BurgersProblem problem = BurgersProblem::None) : problem_(problem) {}

  std::string name() const override { return "burgers"; }
  Scalar flux(Scalar u, Scalar, Scalar) const override { return Scalar(0.5) * u * u; }
  Scalar slope(Scalar u, Scalar, Scalar) const override { return Scalar(0.5) * u; }
  Scalar slope_derivative(Scalar, Scalar, Scalar) const override { return Scalar(0.5); }
  Scalar flux_derivative(Scalar u, Scalar, Scalar) const override { return u; }
  bool convex() const override { return true; }
  std::optional<Scalar> sonic_point() const override { return Scalar(0); }

  BurgersProblem problem() const { return problem_; }

  std::optional<Scalar> exact(Scalar x, Scalar t) const override {
    switch (problem_) {
      case BurgersProblem::P1: {
        if (t < Scalar(0.25)) {
          if (x <= (Scalar(1) + Scalar(6) * t) / Scalar(4)) return Scalar(2);
          if (x <= (Scalar(1) + t) / Scalar(2)) return Scalar(1);
          return Scalar(0);
        }
        return x <= Scalar(0.375) + t ? Scalar(2) : Scalar(0);
      }
      case BurgersProblem::P2: {
        if (x <= -t) return Scalar(-1);
        if (x >= t) return Scalar(1);
        return x / t;
      }
      case BurgersProblem::None:
        break;
    }
    return std::nullopt;
  }

  std::vector<Scalar> breakpoints(Scalar t) const override {
    switch (problem_) {
      case BurgersProblem::P1:
        if (t < Scalar(0.25)) return {(Scalar(1) + Scalar(6) * t) / Scalar(4), (Scalar(1) + t) / Scalar(2)};
        return {Scalar(0.375) + t};
      case BurgersProblem::P2:
        if (t == Scalar(0)) return {Scalar(0)};
        return {-t, t};
      case BurgersProblem::None:
        break;
    }
    return {};
  }

 private:
  BurgersProblem problem_;
};

// Kernel eta(y) = alpha ((y + x1)(x2 - y))^(5/2) on [-x1, x2], sampled at the
// offsets (m + 1/2) h between an edge and the surrounding cell centres.
template <typename Scalar>
struct NonlocalKernel {
  Scalar x1 = 0;
  Scalar x2 = 0;
  Scalar alpha = 0;
  Index first = 0;  // offset index of weights[0]
  ArrayX<Scalar> weights;

  static Scalar shape(Scalar y, Scalar x1, Scalar x2) {
    using std::pow;
    const Scalar b = (y + x1) * (x2 - y);
    return b > Scalar(0) ? pow(b, Scalar(2.5)) : Scalar(0);
  }

  // Normaliser of the continuous kernel.
  static Scalar continuous_alpha(Scalar x1, Scalar x2) {
    using std::pow;
    using std::tgamma;
    const Scalar beta = tgamma(Scalar(3.5)) * tgamma(Scalar(3.5)) / tgamma(Scalar(7));
    return Scalar(1) / (pow(x1 + x2, Scalar(6)) * beta);
  }

  static NonlocalKernel build(Scalar x1, Scalar x2, Scalar h) {
    using std::ceil;
    using std::floor;
    NonlocalKernel k;
    k.x1 = x1;
    k.x2 = x2;
    const Index lo = static_cast<Index>(floor(-x1 / h - Scalar(0.5)));
    const Index hi = static_cast<Index>(ceil(x2 / h - Scalar(0.5)));
    std::vector<Scalar> w;
    Index first = hi + 1;
    for (Index m = lo; m <= hi; ++m) {
      const Scalar s = shape((Scalar(m) + Scalar(0.5)) * h, x1, x2);
      if (s <= Scalar(0)) continue;
      if (first > hi) first = m;
      w.resize(static_cast<size_t>(m - first + 1), Scalar(0));
      w.back() = s;
    }
    if (w.empty()) throw SolverError(ErrorCode::KernelUnresolved, "kernel has no samples on this grid");
    k.first = first;
    k.weights = Eigen::Map<const ArrayX<Scalar>>(w.data(), static_cast<Index>(w.size()));
    const Scalar total = k.weights.sum() * h;
    k.alpha = Scalar(1) / total;
    k.weights *= k.alpha;
    return k;
  }

  Scalar eta(Scalar y) const { return alpha * shape(y, x1, x2); }
  Scalar mass(Scalar h) const { return weights.sum() * h; }
};

// Nonlocal LWR traffic model with speed V = vmax (1 - rho)(1 - rho * eta).
template <typename Scalar>
class LwrNonlocal : public FluxModel<Scalar> {
 public:
  LwrNonlocal(Scalar x1, Scalar x2, Scalar vmax, const Grid<Scalar>& grid, Scalar min_support_cells = 8)
      : vmax_(vmax), grid_(grid) {
    if (!(x1 >= Scalar(0) && x2 >= Scalar(0)) || !(x1 + x2 > Scalar(0))) {
      throw SolverError(ErrorCode::ConfigInvalid, "kernel horizon needs x1, x2 >= 0 and x1 + x2 > 0");
    }
    if ((x1 + x2) / grid.h() < min_support_cells) {
      throw SolverError(ErrorCode::KernelUnresolved, "kernel support spans too few cells");
    }
    kernel_ = NonlocalKernel<Scalar>::build(x1, x2, grid.h());
  }

  std::string name() const override { return "lwr_nonlocal"; }
  const NonlocalKernel<Scalar>& kernel() const { return kernel_; }

  Scalar speed(Scalar rho, Scalar conv) const {
    return vmax_ * (Scalar(1) - rho) * (Scalar(1) - conv);
  }
  Scalar flux(Scalar u, Scalar x, Scalar) const override { return u * speed(u, convolution(x)); }
  Scalar slope(Scalar u, Scalar x, Scalar) const override { return speed(u, convolution(x)); }
  Scalar slope_derivative(Scalar, Scalar x, Scalar) const override {
    return -vmax_ * (Scalar(1) - convolution(x));
  }
  Scalar flux_derivative(Scalar u, Scalar x, Scalar) const override {
    return vmax_ * (Scalar(1) - Scalar(2) * u) * (Scalar(1) - convolution(x));
  }

  // The worst case over the admissible convolution values is an empty road.
  DerivativeBounds<Scalar> derivative_bounds(Scalar lo, Scalar hi,
                                             Scalar safety = Scalar(kBoundSafety)) const override {
    return sample_bounds<Scalar>(
        lo, hi, safety, [&](Scalar) { return -vmax_; },
        [&](Scalar u) { return vmax_ * (Scalar(1) - Scalar(2) * u); });
  }

  void pre_step(const CellField<Scalar>& u, Scalar) override {
    rho_ = u.values;
    const Index n = grid_.n_cells;
    edge_conv_.resize(n + 3);
    for (Index e = -1; e <= n + 1; ++e) {
      Scalar s = 0;
      for (Index m = 0; m < kernel_.weights.size(); ++m) s += kernel_.weights[m] * density(e + kernel_.first + m);
      edge_conv_[e + 1] = s * grid_.h();
    }
  }

  // (rho * eta)(x) by the same quadrature as the edge cache.
  Scalar convolution(Scalar x) const {
    using std::abs;
    using std::floor;
    using std::round;
    if (rho_.size() == 0) return Scalar(0);
    const Scalar h = grid_.h();
    const Scalar pos = (x - grid_.x_left) / h;
    const Scalar e = round(pos);
    const Index n = grid_.n_cells;
    if (abs(pos - e) < Scalar(1e-9) && e >= Scalar(-1) && e <= Scalar(n + 1)) {
      return edge_conv_[static_cast<Index>(e) + 1];
    }
    Scalar s = 0;
    for (Index m = 0; m < kernel_.weights.size(); ++m) {
      const Scalar y = (Scalar(kernel_.first + m) + Scalar(0.5)) * h;
      s += kernel_.weights[m] * density(static_cast<Index>(floor(pos + y / h)));
    }
    return s * h;
  }

 private:
  Scalar density(Index c) const {
    const Index n = grid_.n_cells;
    if (grid_.boundary == Boundary::Periodic) return rho_[((c % n) + n) % n];
    return rho_[std::clamp<Index>(c, 0, n - 1)];
  }

  Scalar vmax_;
  Grid<Scalar> grid_;
  NonlocalKernel<Scalar> kernel_;
  ArrayX<Scalar> rho_;
  ArrayX<Scalar> edge_conv_;
};

// Initial density: three queues of cars and a jam from x = 1.5 on.
template <typename Scalar>
Scalar lwr_initial_density(Scalar x) {
  if (x >= Scalar(-2.8) && x <= Scalar(-1.8)) return Scalar(0.5);
  if (x >= Scalar(-1.2) && x <= Scalar(-0.2)) return Scalar(0.75);
  if (x >= Scalar(0.6) && x <= Scalar(1.0)) return Scalar(0.75);
  if (x >= Scalar(1.5)) return Scalar(1);
  return Scalar(0);
}

template <typename Scalar>
std::vector<Scalar> lwr_initial_breakpoints() {
  return {Scalar(-2.8), Scalar(-1.8), Scalar(-1.2), Scalar(-0.2), Scalar(0.6), Scalar(1.0), Scalar(1.5)};
}

// phi(r) = r^2 - 4r + 11/2, the radial speed of the Keyfitz-Kranzer flux.
template <typename Scalar>
Scalar kk_phi(Scalar r) {
  return r * r - Scalar(4) * r + Scalar(5.5);
}

// The radius equation r_t + (r phi(r))_x = 0, whose slope phi(r) is shared
// by every component.
template <typename Scalar>
class KeyfitzKranzerRadius : public FluxModel<Scalar> {
 public:
  std::string name() const override { return "keyfitz_kranzer"; }
  Scalar flux(Scalar r, Scalar, Scalar) const override { return r * kk_phi(r); }
  Scalar slope(Scalar r, Scalar, Scalar) const override { return kk_phi(r); }
  Scalar slope_derivative(Scalar r, Scalar, Scalar) const override { return Scalar(2) * r - Scalar(4); }
  Scalar flux_derivative(Scalar r, Scalar, Scalar) const override {
    return Scalar(3) * r * r - Scalar(8) * r + Scalar(5.5);
  }
};

template <typename Scalar>
struct KKState {
  CellField<Scalar> r;
  CellField<Scalar> u1;
  CellField<Scalar> u2;

  // || r - |u| ||_1
  Scalar radius_drift() const {
    const ArrayX<Scalar> mod = (u1.values.square() + u2.values.square()).sqrt();
    return (r.values - mod).abs().sum() * r.grid.h();
  }
};

template <typename Scalar>
KKState<Scalar> kk_initial(const Grid<Scalar>& grid) {
  using std::cos;
  using std::sin;
  const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
  auto r0 = [&](Scalar x) { return sin(pi * x) + Scalar(1.5); };
  KKState<Scalar> s;
  s.r = CellField<Scalar>(grid, cell_averages<Scalar>(grid, r0));
  s.u1 = CellField<Scalar>(grid, cell_averages<Scalar>(grid, [&](Scalar x) { return r0(x) * sin(pi * x); }));
  s.u2 = CellField<Scalar>(grid, cell_averages<Scalar>(grid, [&](Scalar x) { return r0(x) * cos(pi * x); }));
  return s;
}

template <typename Scalar>
struct KKStepOutcome {
  KKState<Scalar> state;
  StepReport<Scalar> report;  // diagnostics of r
  EdgeData<Scalar> edges;
};

template <typename Scalar>
EdgeData<Scalar> kk_edges(const KKState<Scalar>& s, const LimiterKind& limiter) {
  KeyfitzKranzerRadius<Scalar> radius;
  EdgeData<Scalar> ed = noflow_slopes(s.r, radius, limiter);
  if ((ed.states < Scalar(0)).any()) {
    throw SolverError(ErrorCode::NegativeRadius, "reconstructed radius is negative");
  }
  return ed;
}

template <typename Scalar>
KKStepOutcome<Scalar> kk_step(const KKState<Scalar>& s, const SchemeConfig<Scalar>& cfg, Scalar dt,
                              const EdgeData<Scalar>* precomputed = nullptr) {
  KKStepOutcome<Scalar> out;
  out.edges = precomputed ? *precomputed : kk_edges(s, cfg.limiter);
  const Scalar k = cfg.k();
  Advance<Scalar> ar = advance_with_edges(s.r, out.edges, dt, k);
  Advance<Scalar> a1 = advance_with_edges(s.u1, out.edges, dt, k);
  Advance<Scalar> a2 = advance_with_edges(s.u2, out.edges, dt, k);
  out.state.r = CellField<Scalar>(s.r.grid, std::move(ar.values));
  out.state.u1 = CellField<Scalar>(s.u1.grid, std::move(a1.values));
  out.state.u2 = CellField<Scalar>(s.u2.grid, std::move(a2.values));
  out.report = describe(out.state.r);
  out.report.dt_used = dt;
  out.report.new_widths_min = ar.widths_min;
  out.report.boundary_inflow = ar.boundary_inflow;
  return out;
}

}  // namespace noflow
