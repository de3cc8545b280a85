#pragma once

#include "cgm/geometry/surface.hpp"
#include "cgm/numerics/linalg.hpp"

namespace cgm {

enum class RbfKernel {
  polyharmonic_linear, // xi(r) = r
  thin_plate,          // xi(r) = r^2 log r
  gaussian             // xi(r) = exp(-(r / shape)^2)
};

double rbf_kernel(RbfKernel kernel, double r, double shape);

/// s(x) = q(x) + sum_i beta_i xi(|x - x_i|) with a degree-1 polynomial tail q
/// and side conditions sum_i beta_i p(x_i) = 0 for every degree-1 monomial p.
struct RbfInterpolant {
  RbfKernel kernel = RbfKernel::polyharmonic_linear;
  double shape = 1.0;
  Matrix sites;   // N x d
  Matrix weights; // N x out
  Matrix poly;    // (d + 1) x out; row 0 is the constant term

  Matrix evaluate(const Matrix& x) const;
};

RbfInterpolant rbf_fit(const Matrix& x, const Matrix& y, RbfKernel kernel = RbfKernel::polyharmonic_linear,
                       double shape = 1.0);

/// Deforms `mesh` with the RBF map taking reference -> deformed, where the
/// `fixed` points are appended to both clouds and map to themselves.
Points morph_mesh(const Points& reference, const Points& deformed, const Points& fixed, const Points& mesh,
                  RbfKernel kernel = RbfKernel::polyharmonic_linear, double shape = 1.0);

} // namespace cgm
