#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cgm/numerics/linalg.hpp"
#include "cgm/reduction/gpr.hpp"

namespace cgm {

struct AsOptions {
  int dim = 1;
  int bootstrap = 100;
  std::uint64_t seed = 0;
  /// Explicit bootstrap row selections; when nonempty they replace the random
  /// resamples and `bootstrap` is ignored.
  std::vector<std::vector<Eigen::Index>> resamples;
  int threads = 1;
};

struct AsSubspace {
  Vector eigenvalues;  // descending, clamped at zero
  Matrix eigenvectors; // R x R orthonormal, column i pairs with eigenvalues[i]
  int dim = 1;
  Vector band_min, band_max, band_mean; // bootstrap eigenvalue bands (empty without replicates)

  Matrix active() const { return eigenvectors.leftCols(dim); }
  Matrix inactive() const { return eigenvectors.rightCols(eigenvectors.cols() - dim); }
  /// Active variables W1^T mu, one row per sample.
  Matrix project(const Matrix& mu) const { return mu * active(); }
};

/// Eigendecomposition of (1/n) sum grad grad^T with bootstrap bands.
AsSubspace as_fit(const Matrix& samples, const Matrix& gradients, const AsOptions& options = {});

struct AsResponseSurface {
  AsSubspace subspace;
  GprModel gpr;

  Vector predict(const Matrix& mu) const { return gpr.predict(subspace.project(mu)); }
};

AsResponseSurface as_response_surface(const AsSubspace& subspace, const Matrix& mu, const Vector& f,
                                      const GprOptions& options = {});

/// Central differences (f(mu + h e_i) - f(mu - h e_i)) / 2h, one row per sample.
Matrix fd_gradients(const std::function<double(const Vector&)>& f, const Matrix& mu, double h = 1e-5);

} // namespace cgm
