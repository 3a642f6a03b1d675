#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "noflow/grid.hpp"

namespace noflow {

inline constexpr int kBoundSamples = 10000;
inline constexpr double kBoundSafety = 1.05;

template <typename Scalar>
struct DerivativeBounds {
  Scalar slope_term = 0;  // max |u f'(u)|
  Scalar flux_term = 0;   // max |(u f(u))'|
};

// Dense sampling of the two derivative bounds on [lo, hi].
template <typename Scalar, typename SlopeDeriv, typename FluxDeriv>
DerivativeBounds<Scalar> sample_bounds(Scalar lo, Scalar hi, Scalar safety, SlopeDeriv&& fp,
                                       FluxDeriv&& hp) {
  using std::abs;
  using std::max;
  DerivativeBounds<Scalar> b;
  const int n = hi > lo ? kBoundSamples : 1;
  for (int i = 0; i < n; ++i) {
    const Scalar u = n == 1 ? lo : lo + (hi - lo) * Scalar(i) / Scalar(n - 1);
    b.slope_term = max(b.slope_term, abs(u * fp(u)));
    b.flux_term = max(b.flux_term, abs(hp(u)));
  }
  b.slope_term *= safety;
  b.flux_term *= safety;
  return b;
}

// Scalar conservation law u_t + H(u, x, t)_x = 0 together with its no-flow
// slope f = H/u, given in closed form so that u = 0 is never special.
template <typename Scalar>
class FluxModel {
 public:
  virtual ~FluxModel() = default;

  virtual std::string name() const = 0;
  virtual Scalar flux(Scalar u, Scalar x, Scalar t) const = 0;
  virtual Scalar slope(Scalar u, Scalar x, Scalar t) const = 0;
  virtual Scalar slope_derivative(Scalar u, Scalar x, Scalar t) const = 0;
  virtual Scalar flux_derivative(Scalar u, Scalar x, Scalar t) const = 0;

  virtual DerivativeBounds<Scalar> derivative_bounds(Scalar lo, Scalar hi,
                                                     Scalar safety = Scalar(kBoundSafety)) const {
    return sample_bounds<Scalar>(
        lo, hi, safety, [&](Scalar u) { return slope_derivative(u, Scalar(0), Scalar(0)); },
        [&](Scalar u) { return flux_derivative(u, Scalar(0), Scalar(0)); });
  }

  // Called once per step before any slope evaluation.
  virtual void pre_step(const CellField<Scalar>&, Scalar) {}

  virtual std::optional<Scalar> exact(Scalar, Scalar) const { return std::nullopt; }
  // Points where the exact solution is discontinuous or kinked at time t.
  virtual std::vector<Scalar> breakpoints(Scalar) const { return {}; }

  virtual bool convex() const { return false; }
  // Minimiser of a convex H, if H has one.
  virtual std::optional<Scalar> sonic_point() const { return std::nullopt; }
};

}  // namespace noflow
