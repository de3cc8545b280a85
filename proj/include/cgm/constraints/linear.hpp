#pragma once

#include <array>

#include "cgm/geometry/surface.hpp"
#include "cgm/numerics/linalg.hpp"

namespace cgm {

enum class TargetSpace { cloud, displacement };

/// a x = c on a row-wise vectorized point cloud or displacement field.
struct LinearConstraint {
  Matrix a;
  Vector c;
  TargetSpace space = TargetSpace::cloud;
  std::array<bool, 3> components{true, true, true};

  Eigen::Index rows() const { return a.rows(); }
  Eigen::Index dim() const { return a.cols(); }
  Vector residual(const Vector& x) const { return a * x - c; }
};

/// Three rows, one per coordinate, each averaging that coordinate over M points.
LinearConstraint barycenter_constraint(Eigen::Index point_count, const Vec3& target);

struct EnforcedCloud {
  Points cloud;
  Vector correction; // vectorized, same layout as flatten(cloud)
};

/// Minimum-norm correction dx with a (x + dx) = c.
EnforcedCloud enforce_on_cloud(const Points& cloud, const LinearConstraint& constraint);

/// Precomputed projection onto {x : a x = c} for repeated batch use.
class LinearEnforcer {
public:
  LinearEnforcer() = default;
  explicit LinearEnforcer(LinearConstraint constraint);

  const LinearConstraint& constraint() const { return constraint_; }

  /// Rows of `batch` are vectorized clouds; returns the corrected rows.
  Matrix apply(const Matrix& batch) const;
  /// Pulls row gradients back through the projection: g (I - a^+ a).
  Matrix backward(const Matrix& grad) const;

private:
  LinearConstraint constraint_;
  MinNormSolver<double> solver_;
};

} // namespace cgm
