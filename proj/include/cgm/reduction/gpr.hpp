#pragma once

#include <optional>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

struct GprOptions {
  std::optional<double> length_scale;    // fixed; otherwise median-distance heuristic + grid
  std::optional<double> signal_variance; // fixed; otherwise the variance of y (1 if zero)
  double nugget = 1e-10;                 // relative to the signal variance
  double max_nugget = 1e-4;
};

/// Zero-noise Gaussian process with squared-exponential kernel
/// k(x, x') = s2 exp(-|x - x'|^2 / (2 l^2)) around the training mean of y.
struct GprModel {
  Matrix inputs;
  Vector alpha; // (K + nugget s2 I)^-1 (y - mean)
  double mean = 0.0;
  double length_scale = 1.0;
  double signal_variance = 1.0;
  double nugget = 0.0;
  double loo_error = 0.0; // sum of squared leave-one-out residuals at the chosen length scale

  Vector predict(const Matrix& x) const;
};

GprModel gpr_fit(const Matrix& x, const Vector& y, const GprOptions& options = {});
inline Vector gpr_predict(const GprModel& model, const Matrix& x) { return model.predict(x); }

/// Median of the pairwise Euclidean distances between rows (1 when undefined).
double median_pairwise_distance(const Matrix& x);

} // namespace cgm
