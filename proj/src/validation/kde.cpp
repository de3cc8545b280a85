#include "cgm/validation/kde.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace cgm {

KdeModel kde_fit(const Vector& samples) {
  const Eigen::Index n = samples.size();
  if (n < 2) throw DegenerateError("kde_fit: need at least two samples");
  if (!samples.allFinite()) throw DegenerateError("kde_fit: samples must be finite");
  const double mean = samples.mean();
  const double var = (samples.array() - mean).square().sum() / static_cast<double>(n - 1);
  const double std = std::sqrt(var);
  if (!(std > 0.0) || std <= 1e-14 * std::abs(mean))
    throw DegenerateError("kde_fit: samples have zero variance");
  KdeModel m;
  m.samples = samples;
  m.bandwidth = std::pow(static_cast<double>(n), -0.2) * std;
  return m;
}

Vector KdeModel::evaluate(const Vector& grid) const {
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  Vector out(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double s = ((samples.array() - grid[g]) / bandwidth).square().unaryExpr([](double u) {
      return std::exp(-0.5 * u);
    }).sum();
    out[g] = norm * s;
  }
  return out;
}

double trapezoid(const Vector& grid, const Vector& values) {
  if (grid.size() != values.size()) throw DimensionError("trapezoid: grid and values differ in length");
  double sum = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return sum;
}

namespace {

std::optional<KdeModel> try_fit(const Vector& v) {
  try {
    return kde_fit(v);
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
}

double kl_base2(const Vector& grid, const Vector& p, const Vector& m) {
  Vector integrand(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    integrand[i] = (p[i] > 0.0 && m[i] > 0.0) ? p[i] * std::log2(p[i] / m[i]) : 0.0;
  return trapezoid(grid, integrand);
}

} // namespace

double jsd(const Vector& x, const Vector& y) {
  if (x.size() == 0 || y.size() == 0) throw DimensionError("jsd: empty sample");
  const auto kx = try_fit(x);
  const auto ky = try_fit(y);
  if (!kx || !ky) {
    if (!kx && !ky && x.minCoeff() == x.maxCoeff() && y.minCoeff() == y.maxCoeff() && x[0] == y[0]) return 0.0;
    return 1.0;
  }
  const double pad = kJsdGridPadding * std::max(kx->bandwidth, ky->bandwidth);
  const double lo = std::min(x.minCoeff(), y.minCoeff()) - pad;
  const double hi = std::max(x.maxCoeff(), y.maxCoeff()) + pad;
  const Vector grid = Vector::LinSpaced(kJsdGridPoints, lo, hi);
  Vector p = kx->evaluate(grid);
  Vector q = ky->evaluate(grid);
  p /= trapezoid(grid, p);
  q /= trapezoid(grid, q);
  const Vector m = 0.5 * p + 0.5 * q;
  const double div = 0.5 * kl_base2(grid, p, m) + 0.5 * kl_base2(grid, q, m);
  return std::sqrt(std::clamp(div, 0.0, 1.0));
}

} // namespace cgm
