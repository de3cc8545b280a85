#include "cgm/reduction/rbf.hpp"

#include <cmath>

namespace cgm {

double rbf_kernel(RbfKernel kernel, double r, double shape) {
  switch (kernel) {
  case RbfKernel::polyharmonic_linear:
    return r;
  case RbfKernel::thin_plate:
    return r > 0.0 ? r * r * std::log(r) : 0.0;
  case RbfKernel::gaussian:
    return std::exp(-(r / shape) * (r / shape));
  }
  return 0.0;
}

namespace {

Matrix kernel_matrix(RbfKernel kernel, double shape, const Matrix& a, const Matrix& b) {
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = rbf_kernel(kernel, (a.row(i) - b.row(j)).norm(), shape);
  return k;
}

Matrix poly_matrix(const Matrix& x) {
  Matrix p(x.rows(), x.cols() + 1);
  p.col(0).setOnes();
  p.rightCols(x.cols()) = x;
  return p;
}

} // namespace

RbfInterpolant rbf_fit(const Matrix& x, const Matrix& y, RbfKernel kernel, double shape) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (y.rows() != n) throw DimensionError("rbf_fit: sites and values differ in count");
  if (n < d + 1) throw DegenerateError("rbf_fit: need at least d + 1 sites");
  if (kernel == RbfKernel::gaussian && !(shape > 0.0)) throw ConfigError("rbf_fit: gaussian shape must be positive");

  const Eigen::Index size = n + d + 1;
  Matrix system = Matrix::Zero(size, size);
  system.topLeftCorner(n, n) = kernel_matrix(kernel, shape, x, x);
  const Matrix p = poly_matrix(x);
  system.topRightCorner(n, d + 1) = p;
  system.bottomLeftCorner(d + 1, n) = p.transpose();
  Matrix rhs = Matrix::Zero(size, y.cols());
  rhs.topRows(n) = y;

  Eigen::FullPivLU<Matrix> lu(system);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw DegenerateError("rbf_fit: interpolation system is singular (degenerate sites)");
  const Matrix sol = lu.solve(rhs);

  RbfInterpolant s;
  s.kernel = kernel;
  s.shape = shape;
  s.sites = x;
  s.weights = sol.topRows(n);
  s.poly = sol.bottomRows(d + 1);
  return s;
}

Matrix RbfInterpolant::evaluate(const Matrix& x) const {
  if (x.cols() != sites.cols()) throw DimensionError("RbfInterpolant: input dimension mismatch");
  return kernel_matrix(kernel, shape, x, sites) * weights + poly_matrix(x) * poly;
}

Points morph_mesh(const Points& reference, const Points& deformed, const Points& fixed, const Points& mesh,
                  RbfKernel kernel, double shape) {
  if (reference.rows() != deformed.rows()) throw DimensionError("morph_mesh: clouds differ in point count");
  Matrix src(reference.rows() + fixed.rows(), 3), dst(reference.rows() + fixed.rows(), 3);
  src << Matrix(reference), Matrix(fixed);
  dst << Matrix(deformed), Matrix(fixed);
  const RbfInterpolant s = rbf_fit(src, dst, kernel, shape);
  return s.evaluate(Matrix(mesh));
}

} // namespace cgm
