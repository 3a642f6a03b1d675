#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "noflow/errors.hpp"

namespace noflow {

enum class LimiterType { MM2, MM3, UNO };

struct LimiterKind {
  LimiterType type = LimiterType::MM2;
  double alpha = 1.4;  // MM3 only

  static LimiterKind mm2() { return {LimiterType::MM2, 1.4}; }
  static LimiterKind mm3(double alpha = 1.4) {
    if (!(alpha > 0.0)) throw SolverError(ErrorCode::ConfigInvalid, "MM3 alpha must be positive");
    return {LimiterType::MM3, alpha};
  }
  static LimiterKind uno() { return {LimiterType::UNO, 1.4}; }

  // Bound on the sensitivity of a reconstructed edge value to the cell values,
  // used to size the viscosity k.
  double variation_bound() const {
    switch (type) {
      case LimiterType::MM2: return 5.0 / 8.0;
      case LimiterType::MM3: return 0.5 + alpha / 8.0;
      case LimiterType::UNO: return 0.75;
    }
    return 5.0 / 8.0;
  }

  // Lipschitz constant (l1) of the window -> slope map.
  double slope_lipschitz() const {
    switch (type) {
      case LimiterType::MM2: return 2.0;
      case LimiterType::MM3: return alpha + 2.0;
      case LimiterType::UNO: return 5.0;
    }
    return 2.0;
  }

  std::string name() const {
    switch (type) {
      case LimiterType::MM2: return "mm2";
      case LimiterType::MM3: return "mm3";
      case LimiterType::UNO: return "uno";
    }
    return "mm2";
  }
};

inline LimiterKind parse_limiter(const std::string& s, double alpha = 1.4) {
  if (s == "mm2" || s == "minmod") return LimiterKind::mm2();
  if (s == "mm3") return LimiterKind::mm3(alpha);
  if (s == "uno") return LimiterKind::uno();
  throw SolverError(ErrorCode::ConfigInvalid, "unknown limiter '" + s + "'");
}

template <typename Scalar>
constexpr Scalar sgn(Scalar x) {
  return Scalar((x > Scalar(0)) - (x < Scalar(0)));
}

template <typename Scalar>
Scalar mm2(Scalar sigma, Scalar tau) {
  using std::abs;
  using std::min;
  return Scalar(0.5) * (sgn(sigma) + sgn(tau)) * min(abs(sigma), abs(tau));
}

template <typename Scalar>
Scalar mm3(Scalar sigma, Scalar tau, Scalar gamma) {
  return mm2(mm2(sigma, tau), gamma);
}

// Three-argument MinMod written with the pairwise sign sums.
template <typename Scalar>
Scalar mm3_literal(Scalar sigma, Scalar tau, Scalar gamma) {
  using std::abs;
  using std::min;
  const Scalar l1 = sgn(sigma) + sgn(tau);
  const Scalar l2 = sgn(sigma) + sgn(gamma);
  const Scalar l3 = sgn(tau) + sgn(gamma);
  return Scalar(0.125) * l1 * l2 * l3 * min(abs(sigma), min(abs(tau), abs(gamma)));
}

// Limited slope U'_j from the window u_{j-2..j+2}.
template <typename Scalar>
Scalar slope(const LimiterKind& kind, const std::array<Scalar, 5>& u) {
  const Scalar dp = u[3] - u[2];
  const Scalar dm = u[2] - u[1];
  switch (kind.type) {
    case LimiterType::MM2:
      return mm2(dp, dm);
    case LimiterType::MM3: {
      const Scalar a = Scalar(kind.alpha);
      return mm3(a * dp, Scalar(0.5) * (u[3] - u[1]), a * dm);
    }
    case LimiterType::UNO: {
      const Scalar d2 = u[3] - Scalar(2) * u[2] + u[1];
      const Scalar d2p = u[4] - Scalar(2) * u[3] + u[2];
      const Scalar d2m = u[2] - Scalar(2) * u[1] + u[0];
      const Scalar delta1 = Scalar(0.5) * mm2(d2p, d2);
      const Scalar delta2 = Scalar(0.5) * mm2(d2, d2m);
      return mm2(dp - delta1, dm + delta2);
    }
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar slope(const LimiterKind& kind, Scalar um2, Scalar um1, Scalar u0, Scalar up1, Scalar up2) {
  return slope<Scalar>(kind, {um2, um1, u0, up1, up2});
}

}  // namespace noflow
