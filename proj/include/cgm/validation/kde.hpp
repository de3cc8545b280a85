#pragma once

#include "cgm/numerics/linalg.hpp"

namespace cgm {

inline constexpr int kJsdGridPoints = 512;
inline constexpr double kJsdGridPadding = 3.0; // in bandwidths

/// Gaussian kernel density estimate with Scott's bandwidth n^(-1/5) std.
struct KdeModel {
  Vector samples;
  double bandwidth = 1.0;

  Vector evaluate(const Vector& grid) const;
};

/// Throws DegenerateError for fewer than 2 samples or zero variance.
KdeModel kde_fit(const Vector& samples);
inline Vector kde_eval(const KdeModel& model, const Vector& grid) { return model.evaluate(grid); }

/// Trapezoid rule on a (not necessarily uniform) increasing grid.
double trapezoid(const Vector& grid, const Vector& values);

/// Jensen-Shannon distance between the KDE densities of two samples, base-2
/// logarithms, so the value lies in [0, 1]. A degenerate (constant) sample is
/// treated as a point mass: two point masses at the same value give 0, any
/// other pairing involving a point mass gives 1.
double jsd(const Vector& x, const Vector& y);

} // namespace cgm
