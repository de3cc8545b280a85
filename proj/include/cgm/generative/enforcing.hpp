#pragma once

#include <vector>

#include "cgm/constraints/dataset.hpp"
#include "cgm/constraints/linear.hpp"
#include "cgm/constraints/volume.hpp"

namespace cgm {

/// Per-row record of the volume passes taken in the forward direction.
struct EnforceCache {
  std::vector<std::vector<VolumePass>> passes;
};

/// Final layer mapping vectorized clouds onto the constraint set.
///
/// Linear constraints use the projection x + a^+ (c - a x), whose Jacobian is
/// I - a^+ a. Volume passes project one coordinate column onto a hyperplane
/// whose normal is frozen at the forward value, so the backward pass applies
/// I - u u^T to that column, in reverse pass order.
class EnforcingLayer {
public:
  EnforcingLayer() = default;
  EnforcingLayer(const ConstraintSpec& spec, const Faces& faces, Eigen::Index point_count);

  const ConstraintSpec& spec() const { return spec_; }

  Matrix forward(const Matrix& clouds, EnforceCache* cache = nullptr) const;
  Matrix backward(const EnforceCache& cache, const Matrix& grad) const;

private:
  ConstraintSpec spec_;
  Faces faces_;
  Eigen::Index points_ = 0;
  LinearEnforcer linear_;
};

} // namespace cgm
