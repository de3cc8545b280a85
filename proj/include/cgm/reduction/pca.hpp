#pragma once

#include <optional>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

/// Centered principal basis of a snapshot matrix (rows are snapshots).
struct PcaBasis {
  Matrix modes;           // M x r, orthonormal columns, descending singular value
  Vector mean;            // M
  Vector singular_values; // all singular values of the centered data
  double tolerance = 0.0; // Frobenius tolerance requested (0 when r was fixed)
  double reconstruction_error = 0.0; // ||(I - U U^T)(X - mean)||_F

  Eigen::Index rank() const { return modes.cols(); }
  Eigen::Index dim() const { return modes.rows(); }

  /// Coefficients (X - mean) U, one row per snapshot.
  Matrix project(const Matrix& snapshots) const;
  /// Y U^T + mean, one row per coefficient vector.
  Matrix reconstruct(const Matrix& coefficients) const;
};

struct PcaOptions {
  std::optional<double> tolerance; // smallest r with truncation error <= tolerance
  std::optional<int> modes;        // fixed r, takes precedence
};

/// Returns at least one mode even when the tolerance admits none.
PcaBasis pca_fit(const Matrix& snapshots, const PcaOptions& options);

} // namespace cgm
