#pragma once

#include <optional>
#include <vector>

#include "cgm/constraints/linear.hpp"
#include "cgm/constraints/volume.hpp"
#include "cgm/geometry/ffd.hpp"

namespace cgm {

struct CffdOptions {
  /// Per-control-point weights of the minimized norm ||diag(w) dd||. A weight
  /// of 0 or +inf pins the control point: it is removed from the solve and its
  /// correction is exactly zero.
  std::optional<Vector> weights;
  /// Indices of the reference points the linear constraint is written over;
  /// empty means the whole cloud.
  std::vector<int> subset;
};

/// Matrix mapping the vectorized correction dd (row-wise, 3 per control
/// point) to the vectorized displacement of `points`: kron(B, A_phi).
Matrix displacement_operator(const FfdLattice& lattice, const Points& points);

/// Composite system a_c * kron(B, A_phi) acting on corrections.
Matrix cffd_system(const FfdLattice& lattice, const Points& reference, const LinearConstraint& constraint,
                   const CffdOptions& options = {});

/// Minimum-(weighted-)norm correction dd such that the deformed cloud
/// T(reference, free + dd) satisfies the linear constraint.
DisplacementField cffd_correct(const FfdLattice& lattice, const Points& reference, const DisplacementField& free,
                               const LinearConstraint& constraint, const CffdOptions& options = {});

/// Volume version: one minimum-norm solve per lattice axis, in the given
/// order, each exact because the volume is affine along a fixed direction.
DisplacementField cffd_correct_volume(const FfdLattice& lattice, const TriSurface& reference,
                                      const DisplacementField& free, double target, const CffdOptions& options = {},
                                      const VolumeEnforcement& how = {});

/// Pinned-control-point mask (true = pinned) derived from optional weights.
std::vector<bool> pinned_mask(const FfdLattice& lattice, const std::optional<Vector>& weights);

} // namespace cgm
