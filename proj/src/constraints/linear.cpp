#include "cgm/constraints/linear.hpp"

namespace cgm {

LinearConstraint barycenter_constraint(Eigen::Index point_count, const Vec3& target) {
  if (point_count < 1) throw DimensionError("barycenter_constraint: need at least one point");
  LinearConstraint k;
  k.a = Matrix::Zero(3, 3 * point_count);
  for (Eigen::Index i = 0; i < point_count; ++i)
    for (int d = 0; d < 3; ++d) k.a(d, 3 * i + d) = 1.0 / static_cast<double>(point_count);
  k.c = target;
  return k;
}

EnforcedCloud enforce_on_cloud(const Points& cloud, const LinearConstraint& constraint) {
  if (constraint.space != TargetSpace::cloud) throw DimensionError("enforce_on_cloud: constraint does not act on clouds");
  const Vector x = flatten(cloud);
  if (x.size() != constraint.dim()) throw DimensionError("enforce_on_cloud: cloud size does not match constraint");
  EnforcedCloud out;
  out.correction = lstsq_min_norm<double>(constraint.a, constraint.c - constraint.a * x);
  out.cloud = unflatten(x + out.correction);
  return out;
}

LinearEnforcer::LinearEnforcer(LinearConstraint constraint)
    : constraint_(std::move(constraint)), solver_(constraint_.a) {}

Matrix LinearEnforcer::apply(const Matrix& batch) const {
  if (batch.cols() != constraint_.dim()) throw DimensionError("LinearEnforcer: batch width does not match constraint");
  Matrix out = batch;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const Vector x = batch.row(i).transpose();
    out.row(i) += solver_.solve(constraint_.c - constraint_.a * x).transpose();
  }
  return out;
}

Matrix LinearEnforcer::backward(const Matrix& grad) const {
  return grad - (grad * constraint_.a.transpose()) * solver_.pseudo_inverse().transpose();
}

} // namespace cgm
