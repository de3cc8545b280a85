#include "cgm/generative/enforcing.hpp"

namespace cgm {

EnforcingLayer::EnforcingLayer(const ConstraintSpec& spec, const Faces& faces, Eigen::Index point_count)
    : spec_(spec), faces_(faces), points_(point_count) {
  if (point_count < 1) throw DimensionError("EnforcingLayer: need at least one point");
  if (spec.kind == ConstraintKind::barycenter) linear_ = LinearEnforcer(barycenter_constraint(point_count, spec.barycenter));
}

Matrix EnforcingLayer::forward(const Matrix& clouds, EnforceCache* cache) const {
  if (clouds.cols() != 3 * points_) throw DimensionError("EnforcingLayer: cloud width mismatch");
  if (spec_.kind == ConstraintKind::barycenter) return linear_.apply(clouds);

  Matrix out(clouds.rows(), clouds.cols());
  if (cache) cache->passes.assign(static_cast<std::size_t>(clouds.rows()), {});
  for (Eigen::Index i = 0; i < clouds.rows(); ++i) {
    Points v = unflatten(clouds.row(i).transpose());
    auto passes = enforce_volume_in_place(v, faces_, spec_.volume, spec_.volume_how);
    out.row(i) = flatten(v).transpose();
    if (cache) cache->passes[static_cast<std::size_t>(i)] = std::move(passes);
  }
  return out;
}

Matrix EnforcingLayer::backward(const EnforceCache& cache, const Matrix& grad) const {
  if (grad.cols() != 3 * points_) throw DimensionError("EnforcingLayer: gradient width mismatch");
  if (spec_.kind == ConstraintKind::barycenter) return linear_.backward(grad);

  if (cache.passes.size() != static_cast<std::size_t>(grad.rows()))
    throw CacheMismatchError("EnforcingLayer: cache does not match the gradient batch");
  Matrix out(grad.rows(), grad.cols());
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    Points g = unflatten(grad.row(i).transpose());
    const auto& passes = cache.passes[static_cast<std::size_t>(i)];
    for (auto p = passes.rbegin(); p != passes.rend(); ++p) g.col(p->component) -= p->unit_row * p->unit_row.dot(g.col(p->component));
    out.row(i) = flatten(g).transpose();
  }
  return out;
}

} // namespace cgm
