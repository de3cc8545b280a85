#pragma once

#include <array>
#include <vector>

#include "cgm/geometry/surface.hpp"

namespace cgm {

/// One-dimensional Bernstein basis C(degree, index) t^index (1-t)^(degree-index).
double bernstein_eval(int degree, int index, double t);

/// Per-control-point displacements in lattice coordinates, one row per
/// control point ordered by FfdLattice::index.
using DisplacementField = Points;

/// Control lattice of (m+1)(n+1)(o+1) points at (i/m, j/n, k/o) in the unit
/// cube, placed in space by phi(u) = A u + b. Bernstein degrees equal the grid
/// sizes.
class FfdLattice {
public:
  FfdLattice(std::array<int, 3> grid, const Mat3& affine, const Vec3& offset);
  /// Axis-aligned box with corner `origin` and edge lengths `lengths`.
  static FfdLattice box(std::array<int, 3> grid, const Vec3& origin, const Vec3& lengths);

  const std::array<int, 3>& grid() const { return grid_; }
  const Mat3& affine() const { return affine_; }
  const Vec3& offset() const { return offset_; }

  int control_count() const { return (grid_[0] + 1) * (grid_[1] + 1) * (grid_[2] + 1); }
  int index(int i, int j, int k) const { return (i * (grid_[1] + 1) + j) * (grid_[2] + 1) + k; }
  std::array<int, 3> ijk(int index) const;

  /// phi^{-1}(x).
  Vec3 to_lattice(const Vec3& x) const { return affine_inverse_ * (x - offset_); }
  Vec3 from_lattice(const Vec3& u) const { return affine_ * u + offset_; }
  /// Whether phi^{-1}(x) lies in the closed unit cube (1e-12 slack).
  bool contains(const Vec3& x) const;

  /// Control points in space, phi(P_ijk).
  Points control_points() const;
  DisplacementField zero_displacement() const { return DisplacementField::Zero(control_count(), 3); }

  /// Trivariate Bernstein weights, one row per point, one column per control
  /// point. Rows of points outside the lattice are zero.
  Matrix influence_matrix(const Points& points) const;

private:
  std::array<int, 3> grid_;
  Mat3 affine_;
  Mat3 affine_inverse_;
  Vec3 offset_;
};

struct FfdResult {
  Points points;
  std::vector<bool> outside; // true for points passed through unchanged
};

/// Q -> Q + sum_ijk B_ijk(phi^{-1} Q) A dP_ijk for points inside the lattice.
FfdResult ffd_map(const FfdLattice& lattice, const DisplacementField& displacement, const Points& points);

/// Same map from a precomputed influence matrix.
Points ffd_apply(const FfdLattice& lattice, const Matrix& influence, const DisplacementField& displacement,
                 const Points& points);

} // namespace cgm
