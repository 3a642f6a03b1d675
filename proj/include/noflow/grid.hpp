#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <utility>

#include "noflow/errors.hpp"

namespace noflow {

using Index = Eigen::Index;

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

enum class Boundary { Periodic, ConstantExtension };

// Uniform partition of [x_left, x_right].
template <typename Scalar>
struct Grid {
  Scalar x_left = 0;
  Scalar x_right = 1;
  Index n_cells = 1;
  Boundary boundary = Boundary::Periodic;

  Grid() = default;
  Grid(Scalar left, Scalar right, Index n, Boundary bc)
      : x_left(left), x_right(right), n_cells(n), boundary(bc) {
    if (!(right > left) || n <= 0) {
      throw SolverError(ErrorCode::ConfigInvalid, "grid needs x_right > x_left and n_cells > 0");
    }
  }

  Scalar h() const { return (x_right - x_left) / Scalar(n_cells); }
  Scalar length() const { return x_right - x_left; }
  Scalar center(Index j) const { return x_left + (Scalar(j) + Scalar(0.5)) * h(); }
  // Position of the edge between cells e-1 and e.
  Scalar edge(Index e) const { return x_left + Scalar(e) * h(); }

  ArrayX<Scalar> centers() const {
    ArrayX<Scalar> x(n_cells);
    for (Index j = 0; j < n_cells; ++j) x[j] = center(j);
    return x;
  }

  bool same_as(const Grid& o) const {
    return x_left == o.x_left && x_right == o.x_right && n_cells == o.n_cells &&
           boundary == o.boundary;
  }
};

// Cell averages of one scalar component on a grid.
template <typename Scalar>
struct CellField {
  Grid<Scalar> grid;
  ArrayX<Scalar> values;

  CellField() = default;
  explicit CellField(const Grid<Scalar>& g) : grid(g), values(ArrayX<Scalar>::Zero(g.n_cells)) {}
  CellField(const Grid<Scalar>& g, ArrayX<Scalar> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_cells) {
      throw SolverError(ErrorCode::ConfigInvalid, "field length does not match grid");
    }
    if (!values.isFinite().all()) {
      throw SolverError(ErrorCode::ConfigInvalid, "field has non-finite entries");
    }
  }

  Index size() const { return values.size(); }
  Scalar operator[](Index j) const { return values[j]; }
  Scalar& operator[](Index j) { return values[j]; }

  Scalar mass() const { return values.sum() * grid.h(); }
  Scalar min() const { return values.minCoeff(); }
  Scalar max() const { return values.maxCoeff(); }
};

// Number of ghost cells on each side of a padded array. The stepper needs
// limiter slopes in the first ghost cell, which reaches four cells out.
inline constexpr Index kGhosts = 4;

// Copy of v with g ghost cells per side filled by the boundary policy.
template <typename Scalar>
ArrayX<Scalar> padded(const ArrayX<Scalar>& v, Boundary bc, Index g = kGhosts) {
  const Index n = v.size();
  ArrayX<Scalar> p(n + 2 * g);
  p.segment(g, n) = v;
  for (Index i = 0; i < g; ++i) {
    if (bc == Boundary::Periodic) {
      Index l = ((i - g) % n + n) % n;
      Index r = i % n;
      p[i] = v[l];
      p[g + n + i] = v[r];
    } else {
      p[i] = v[0];
      p[g + n + i] = v[n - 1];
    }
  }
  return p;
}

template <typename Scalar>
ArrayX<Scalar> padded(const CellField<Scalar>& u, Index g = kGhosts) {
  return padded(u.values, u.grid.boundary, g);
}

}  // namespace noflow
