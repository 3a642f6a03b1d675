#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "noflow/errors.hpp"
#include "noflow/grid.hpp"
#include "noflow/quadrature.hpp"

namespace noflow {

template <typename Scalar>
Scalar l1_norm(const CellField<Scalar>& u) {
  return u.values.abs().sum() * u.grid.h();
}

// Block average of a fine field onto a coarser grid over the same domain.
template <typename Scalar>
CellField<Scalar> restrict_to(const CellField<Scalar>& fine, const Grid<Scalar>& coarse) {
  const Index nf = fine.grid.n_cells;
  const Index nc = coarse.n_cells;
  if (fine.grid.x_left != coarse.x_left || fine.grid.x_right != coarse.x_right || nf % nc != 0) {
    throw SolverError(ErrorCode::IncompatibleGrids, "reference grid is not an integer refinement");
  }
  const Index r = nf / nc;
  CellField<Scalar> out(coarse);
  for (Index j = 0; j < nc; ++j) out[j] = fine.values.segment(j * r, r).sum() / Scalar(r);
  return out;
}

template <typename Scalar>
Scalar l1_error(const CellField<Scalar>& u, const CellField<Scalar>& reference) {
  const CellField<Scalar> ref =
      reference.grid.n_cells == u.grid.n_cells ? reference : restrict_to(reference, u.grid);
  if (ref.grid.x_left != u.grid.x_left || ref.grid.x_right != u.grid.x_right) {
    throw SolverError(ErrorCode::IncompatibleGrids, "fields live on different domains");
  }
  return (u.values - ref.values).abs().sum() * u.grid.h();
}

// Error against a pointwise reference, averaged per cell with Gauss quadrature
// split at the reference's breakpoints.
template <typename Scalar, typename F>
Scalar l1_error(const CellField<Scalar>& u, F&& reference, const std::vector<Scalar>& breaks) {
  const ArrayX<Scalar> avg = cell_averages<Scalar>(u.grid, reference, breaks);
  return (u.values - avg).abs().sum() * u.grid.h();
}

// Integral of |P| where P is the primitive of a piecewise-constant density d
// with cell width h, starting from P = 0 at the left end.
template <typename Scalar>
Scalar primitive_abs_integral(const ArrayX<Scalar>& d, Scalar h) {
  using std::abs;
  Scalar p = 0;
  Scalar total = 0;
  for (Index j = 0; j < d.size(); ++j) {
    const Scalar q = p + d[j] * h;
    if ((p >= Scalar(0)) == (q >= Scalar(0)) || p == Scalar(0) || q == Scalar(0)) {
      total += Scalar(0.5) * (abs(p) + abs(q)) * h;
    } else {
      // P crosses zero inside the cell.
      total += Scalar(0.5) * (p * p + q * q) / abs(d[j]);
    }
    p = q;
  }
  return total;
}

inline constexpr double kMassTolerance = 1e-8;

template <typename Scalar>
Scalar w1_error(const CellField<Scalar>& u, const CellField<Scalar>& reference) {
  using std::abs;
  const CellField<Scalar> ref =
      reference.grid.n_cells == u.grid.n_cells ? reference : restrict_to(reference, u.grid);
  const ArrayX<Scalar> d = u.values - ref.values;
  const Scalar h = u.grid.h();
  if (abs(d.sum() * h) > Scalar(kMassTolerance)) {
    throw SolverError(ErrorCode::MassMismatch, "fields differ in mass; W1 is undefined");
  }
  return primitive_abs_integral<Scalar>(d, h);
}

template <typename Scalar, typename F>
Scalar w1_error(const CellField<Scalar>& u, F&& reference, const std::vector<Scalar>& breaks) {
  const CellField<Scalar> ref(u.grid, cell_averages<Scalar>(u.grid, reference, breaks));
  return w1_error(u, ref);
}

template <typename Scalar>
Scalar tv_eps(const CellField<Scalar>& u) {
  const Index n = u.size();
  if (n < 2) return Scalar(0);
  Scalar tv = (u.values.tail(n - 1) - u.values.head(n - 1)).abs().sum();
  if (u.grid.boundary == Boundary::Periodic) tv += std::abs(u.values[0] - u.values[n - 1]);
  return tv * u.grid.h();
}

// Cellwise discrete entropy defect for the constant A, given the split slopes
// on the n+1 interior edges and the split slope at A. Returns max_j R_j.
template <typename Scalar>
Scalar kruzhkov_residual(const CellField<Scalar>& u_old, const CellField<Scalar>& u_new,
                         const ArrayX<Scalar>& f_plus, const ArrayX<Scalar>& f_minus, Scalar a,
                         Scalar fa_plus, Scalar fa_minus, Scalar h, Scalar dt) {
  using std::abs;
  const Index n = u_old.size();
  const ArrayX<Scalar> p = padded(u_old, 1);
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (Index j = 0; j < n; ++j) {
    const Scalar um = p[j];
    const Scalar uj = p[j + 1];
    const Scalar up = p[j + 2];
    const Scalar time = (abs(u_new[j] - a) - abs(uj - a)) / dt;
    const Scalar space = abs(um * f_plus[j] - a * fa_plus) - abs(uj * f_plus[j + 1] - a * fa_plus) +
                         abs(up * f_minus[j + 1] - a * fa_minus) - abs(uj * f_minus[j] - a * fa_minus);
    worst = std::max(worst, time - space / h);
  }
  return worst;
}

template <typename Scalar>
struct RateFit {
  Scalar c = 0;
  Scalar p = 0;
};

// Least squares fit of log E = log C + p log h.
template <typename Scalar>
RateFit<Scalar> fit_rate(const std::vector<std::pair<Scalar, Scalar>>& rows) {
  using std::exp;
  using std::log;
  if (rows.size() < 2) throw SolverError(ErrorCode::NeedTwoPoints, "rate fit needs two rows");
  const Index m = static_cast<Index>(rows.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> a(m, 2);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(m);
  for (Index i = 0; i < m; ++i) {
    a(i, 0) = Scalar(1);
    a(i, 1) = log(rows[i].first);
    b[i] = log(rows[i].second);
  }
  const Eigen::Matrix<Scalar, 2, 1> x = a.colPivHouseholderQr().solve(b);
  return {exp(x[0]), x[1]};
}

struct ErrorRow {
  long cells = 0;
  double h = 0;
  double l1 = 0;
  std::optional<double> w1;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  RateFit<double> fit_l1;
  std::optional<RateFit<double>> fit_w1;

  void refit() {
    std::sort(rows.begin(), rows.end(), [](const ErrorRow& a, const ErrorRow& b) { return a.h > b.h; });
    std::vector<std::pair<double, double>> l1;
    std::vector<std::pair<double, double>> w1;
    for (const ErrorRow& r : rows) {
      l1.emplace_back(r.h, r.l1);
      if (r.w1) w1.emplace_back(r.h, *r.w1);
    }
    if (l1.size() >= 2) fit_l1 = fit_rate(l1);
    if (w1.size() >= 2 && w1.size() == l1.size()) fit_w1 = fit_rate(w1);
  }
};

}  // namespace noflow
