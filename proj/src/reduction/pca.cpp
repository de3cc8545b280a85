#include "cgm/reduction/pca.hpp"

#include <cmath>

namespace cgm {

Matrix PcaBasis::project(const Matrix& snapshots) const {
  if (snapshots.cols() != dim()) throw DimensionError("PcaBasis::project: snapshot width does not match basis");
  return (snapshots.rowwise() - mean.transpose()) * modes;
}

Matrix PcaBasis::reconstruct(const Matrix& coefficients) const {
  if (coefficients.cols() != rank()) throw DimensionError("PcaBasis::reconstruct: coefficient width does not match rank");
  Matrix out = coefficients * modes.transpose();
  out.rowwise() += mean.transpose();
  return out;
}

PcaBasis pca_fit(const Matrix& snapshots, const PcaOptions& options) {
  if (snapshots.rows() < 2) throw DimensionError("pca_fit: need at least two snapshots");
  if (!options.modes && (!options.tolerance || !(*options.tolerance > 0.0)))
    throw ConfigError("pca_fit: need a positive tolerance or a fixed number of modes");

  PcaBasis basis;
  basis.mean = snapshots.colwise().mean().transpose();
  const Matrix centered = snapshots.rowwise() - basis.mean.transpose();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  basis.singular_values = svd.singularValues();
  const Eigen::Index available = basis.singular_values.size();

  // tail[r] = sqrt(sum_{i >= r} sigma_i^2)
  Vector tail = Vector::Zero(available + 1);
  for (Eigen::Index i = available; i-- > 0;)
    tail[i] = std::sqrt(tail[i + 1] * tail[i + 1] + basis.singular_values[i] * basis.singular_values[i]);

  Eigen::Index r = 0;
  if (options.modes) {
    if (*options.modes < 1 || *options.modes > available)
      throw ConfigError("pca_fit: fixed mode count must lie in [1, " + std::to_string(available) + "]");
    r = *options.modes;
  } else {
    basis.tolerance = *options.tolerance;
    r = available;
    for (Eigen::Index k = 0; k <= available; ++k)
      if (tail[k] <= basis.tolerance) {
        r = k;
        break;
      }
    r = std::max<Eigen::Index>(r, 1);
  }
  basis.modes = svd.matrixV().leftCols(r);
  canonicalize_column_signs(basis.modes);
  basis.reconstruction_error = tail[r];
  return basis;
}

} // namespace cgm
