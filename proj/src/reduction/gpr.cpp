#include "cgm/reduction/gpr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cgm {

namespace {

Matrix se_kernel(const Matrix& a, const Matrix& b, double length, double variance) {
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * a * b.transpose()).colwise() + an;
  d2.rowwise() += bn.transpose();
  return variance * (-d2.cwiseMax(0.0) / (2.0 * length * length)).array().exp().matrix();
}

struct Factor {
  Eigen::LLT<Matrix> llt;
  double nugget = 0.0;
  bool ok = false;
};

Factor factor_with_nugget(const Matrix& k, double variance, const GprOptions& options) {
  Factor f;
  for (double nugget = options.nugget; nugget <= options.max_nugget * (1.0 + 1e-12); nugget *= 10.0) {
    Matrix kn = k;
    kn.diagonal().array() += nugget * variance;
    f.llt.compute(kn);
    if (f.llt.info() == Eigen::Success) {
      f.nugget = nugget;
      f.ok = true;
      return f;
    }
  }
  return f;
}

} // namespace

double median_pairwise_distance(const Matrix& x) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) d.push_back((x.row(i) - x.row(j)).norm());
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

GprModel gpr_fit(const Matrix& x, const Vector& y, const GprOptions& options) {
  const Eigen::Index n = x.rows();
  if (n < 1) throw DimensionError("gpr_fit: need at least one training point");
  if (y.size() != n) throw DimensionError("gpr_fit: inputs and outputs differ in count");
  if (options.length_scale && !(*options.length_scale > 0.0)) throw ConfigError("gpr_fit: length scale must be positive");

  GprModel model;
  model.inputs = x;
  model.mean = y.mean();
  const Vector yc = y.array() - model.mean;
  if (options.signal_variance) {
    model.signal_variance = *options.signal_variance;
  } else {
    const double var = yc.squaredNorm() / static_cast<double>(n);
    model.signal_variance = var > 0.0 ? var : 1.0;
  }

  std::vector<double> candidates;
  if (options.length_scale) {
    candidates.push_back(*options.length_scale);
  } else {
    const double base = median_pairwise_distance(x);
    for (double m : {0.25, 0.5, 1.0, 2.0, 4.0}) candidates.push_back(base * m);
  }

  double best_score = std::numeric_limits<double>::infinity();
  bool found = false;
  for (double length : candidates) {
    const Matrix k = se_kernel(x, x, length, model.signal_variance);
    const Factor f = factor_with_nugget(k, model.signal_variance, options);
    if (!f.ok) continue;
    const Vector alpha = f.llt.solve(yc);
    double score = 0.0;
    if (candidates.size() > 1) {
      const Matrix kinv = f.llt.solve(Matrix::Identity(n, n));
      score = (alpha.array() / kinv.diagonal().array()).square().sum();
      if (!std::isfinite(score)) continue;
    }
    if (!found || score < best_score) {
      found = true;
      best_score = score;
      model.alpha = alpha;
      model.length_scale = length;
      model.nugget = f.nugget;
      model.loo_error = score;
    }
  }
  if (!found) throw ConditioningError("gpr_fit: kernel matrix is not positive definite after nugget escalation");
  return model;
}

Vector GprModel::predict(const Matrix& x) const {
  if (x.cols() != inputs.cols()) throw DimensionError("GprModel::predict: input dimension mismatch");
  return (se_kernel(x, inputs, length_scale, signal_variance) * alpha).array() + mean;
}

} // namespace cgm
