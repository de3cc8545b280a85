#include "cgm/constraints/cffd.hpp"

#include <cmath>

namespace cgm {

namespace {

Points select_rows(const Points& points, const std::vector<int>& subset) {
  if (subset.empty()) return points;
  Points out(static_cast<Eigen::Index>(subset.size()), 3);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= points.rows()) throw IndexError("cffd: subset index out of range");
    out.row(static_cast<Eigen::Index>(i)) = points.row(subset[i]);
  }
  return out;
}

// Solves min ||diag(w) x|| s.t. a x = b over unpinned columns; pinned entries
// stay zero. `column_owner` maps each column to its control point.
Vector solve_free_columns(const Matrix& a, const Vector& b, const std::vector<bool>& pinned,
                          const std::optional<Vector>& weights, const std::vector<int>& column_owner) {
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (!pinned[static_cast<std::size_t>(column_owner[static_cast<std::size_t>(j)])]) free_cols.push_back(j);

  Vector x = Vector::Zero(a.cols());
  if (free_cols.empty()) {
    if (b.norm() > 1e-9 * (1.0 + b.norm())) throw InfeasibleError("cffd: every control point is pinned");
    return x;
  }
  Matrix reduced(a.rows(), static_cast<Eigen::Index>(free_cols.size()));
  Vector w(static_cast<Eigen::Index>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    reduced.col(static_cast<Eigen::Index>(k)) = a.col(free_cols[k]);
    w[static_cast<Eigen::Index>(k)] =
        weights ? (*weights)[column_owner[static_cast<std::size_t>(free_cols[k])]] : 1.0;
  }
  const Vector y = lstsq_min_norm<double>(reduced, b, w);
  for (std::size_t k = 0; k < free_cols.size(); ++k) x[free_cols[k]] = y[static_cast<Eigen::Index>(k)];
  return x;
}

} // namespace

std::vector<bool> pinned_mask(const FfdLattice& lattice, const std::optional<Vector>& weights) {
  std::vector<bool> pinned(static_cast<std::size_t>(lattice.control_count()), false);
  if (!weights) return pinned;
  if (weights->size() != lattice.control_count())
    throw DimensionError("cffd: weights must have one entry per control point");
  for (Eigen::Index i = 0; i < weights->size(); ++i) {
    const double w = (*weights)[i];
    if (std::isnan(w) || w < 0.0) throw DimensionError("cffd: weights must be nonnegative");
    pinned[static_cast<std::size_t>(i)] = (w == 0.0 || std::isinf(w));
  }
  return pinned;
}

Matrix displacement_operator(const FfdLattice& lattice, const Points& points) {
  const Matrix b = lattice.influence_matrix(points);
  const Mat3& affine = lattice.affine();
  Matrix g = Matrix::Zero(3 * points.rows(), 3 * lattice.control_count());
  for (Eigen::Index l = 0; l < b.rows(); ++l)
    for (Eigen::Index p = 0; p < b.cols(); ++p) {
      const double w = b(l, p);
      if (w == 0.0) continue;
      g.block<3, 3>(3 * l, 3 * p) = w * affine;
    }
  return g;
}

Matrix cffd_system(const FfdLattice& lattice, const Points& reference, const LinearConstraint& constraint,
                   const CffdOptions& options) {
  const Points q = select_rows(reference, options.subset);
  if (constraint.dim() != 3 * q.rows()) throw DimensionError("cffd: constraint width does not match point count");
  return constraint.a * displacement_operator(lattice, q);
}

DisplacementField cffd_correct(const FfdLattice& lattice, const Points& reference, const DisplacementField& free,
                               const LinearConstraint& constraint, const CffdOptions& options) {
  if (constraint.space != TargetSpace::cloud) throw DimensionError("cffd: constraint must act on the deformed cloud");
  if (free.rows() != lattice.control_count()) throw DimensionError("cffd: displacement field does not match lattice");
  const Points q = select_rows(reference, options.subset);
  const Matrix system = cffd_system(lattice, reference, constraint, options);
  const Points deformed = ffd_apply(lattice, lattice.influence_matrix(q), free, q);
  const Vector rhs = constraint.c - constraint.a * flatten(deformed);

  std::vector<int> owner(static_cast<std::size_t>(system.cols()));
  for (std::size_t j = 0; j < owner.size(); ++j) owner[j] = static_cast<int>(j / 3);
  const Vector dd = solve_free_columns(system, rhs, pinned_mask(lattice, options.weights), options.weights, owner);
  return unflatten(dd);
}

DisplacementField cffd_correct_volume(const FfdLattice& lattice, const TriSurface& reference,
                                      const DisplacementField& free, double target, const CffdOptions& options,
                                      const VolumeEnforcement& how) {
  reference.validate();
  if (!reference.is_closed()) throw OrientationError("cffd: volume constraint needs a closed oriented surface");
  if (free.rows() != lattice.control_count()) throw DimensionError("cffd: displacement field does not match lattice");

  const Matrix influence = lattice.influence_matrix(reference.vertices);
  const std::vector<bool> pinned = pinned_mask(lattice, options.weights);
  std::vector<int> owner(static_cast<std::size_t>(lattice.control_count()));
  for (std::size_t j = 0; j < owner.size(); ++j) owner[j] = static_cast<int>(j);

  DisplacementField correction = DisplacementField::Zero(lattice.control_count(), 3);
  const double start = signed_volume(ffd_apply(lattice, influence, free, reference.vertices), reference.faces);
  const int passes = how.split == VolumeSplit::first_pass ? 1 : 3;
  for (int p = 0; p < passes; ++p) {
    const int axis = how.order[static_cast<std::size_t>(p)];
    const double goal = how.split == VolumeSplit::first_pass ? target : start + (target - start) * (p + 1) / 3.0;
    const Points current = ffd_apply(lattice, influence, DisplacementField(free + correction), reference.vertices);
    // Moving lattice axis `axis` displaces every point along A_phi e_axis.
    const Vec3 direction = lattice.affine().col(axis);
    const Vector along = volume_gradient(current, reference.faces) * direction;
    const Matrix row = (along.transpose() * influence);
    if (!(row.norm() > 0.0)) throw DegenerateError("cffd: volume row vanishes for this lattice");
    const double deficit = goal - signed_volume(current, reference.faces);
    const Vector step = solve_free_columns(row, Vector::Constant(1, deficit), pinned, options.weights, owner);
    correction.col(axis) += step;
  }
  return correction;
}

} // namespace cgm
