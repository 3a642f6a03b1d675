#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "noflow/grid.hpp"

namespace noflow {

// Five-point Gauss-Legendre rule on [a, b].
template <typename Scalar, typename F>
Scalar gauss5(F&& fn, Scalar a, Scalar b) {
  using std::sqrt;
  const Scalar s70 = sqrt(Scalar(70));
  const Scalar r1 = sqrt(Scalar(5) - Scalar(2) * sqrt(Scalar(10) / Scalar(7))) / Scalar(3);
  const Scalar r2 = sqrt(Scalar(5) + Scalar(2) * sqrt(Scalar(10) / Scalar(7))) / Scalar(3);
  const Scalar w0 = Scalar(128) / Scalar(225);
  const Scalar w1 = (Scalar(322) + Scalar(13) * s70) / Scalar(900);
  const Scalar w2 = (Scalar(322) - Scalar(13) * s70) / Scalar(900);
  const Scalar m = Scalar(0.5) * (a + b);
  const Scalar r = Scalar(0.5) * (b - a);
  const Scalar sum = w0 * fn(m) + w1 * (fn(m - r * r1) + fn(m + r * r1)) +
                     w2 * (fn(m - r * r2) + fn(m + r * r2));
  return sum * r;
}

// Cell averages of fn, splitting each cell at the given breakpoints so that a
// piecewise-polynomial fn of degree <= 9 between breakpoints is integrated exactly.
template <typename Scalar, typename F>
ArrayX<Scalar> cell_averages(const Grid<Scalar>& grid, F&& fn, std::vector<Scalar> breaks = {}) {
  std::sort(breaks.begin(), breaks.end());
  const Scalar h = grid.h();
  ArrayX<Scalar> avg(grid.n_cells);
  for (Index j = 0; j < grid.n_cells; ++j) {
    const Scalar a = grid.edge(j);
    const Scalar b = grid.edge(j + 1);
    Scalar lo = a;
    Scalar sum = 0;
    for (Scalar x : breaks) {
      if (x <= a || x >= b) continue;
      sum += gauss5<Scalar>(fn, lo, x);
      lo = x;
    }
    sum += gauss5<Scalar>(fn, lo, b);
    avg[j] = sum / h;
  }
  return avg;
}

}  // namespace noflow
