#include "cgm/reduction/active_subspace.hpp"

#include "cgm/numerics/parallel.hpp"
#include "cgm/numerics/rng.hpp"

namespace cgm {

namespace {

Vector covariance_eigenvalues(const Matrix& gradients, const std::vector<Eigen::Index>& rows) {
  Matrix g(static_cast<Eigen::Index>(rows.size()), gradients.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = gradients.row(rows[i]);
  const Matrix cov = g.transpose() * g / static_cast<double>(rows.size());
  return eigh_symmetric(cov).values.cwiseMax(0.0);
}

} // namespace

AsSubspace as_fit(const Matrix& samples, const Matrix& gradients, const AsOptions& options) {
  if (samples.rows() != gradients.rows() || samples.cols() != gradients.cols())
    throw DimensionError("as_fit: samples and gradients must have the same shape");
  if (gradients.rows() < 1) throw DimensionError("as_fit: need at least one gradient");
  if (!gradients.allFinite()) throw DimensionError("as_fit: gradients must be finite");
  if (options.dim < 1 || options.dim > gradients.cols()) throw ConfigError("as_fit: active dimension out of range");

  const Eigen::Index n = gradients.rows();
  const Matrix cov = gradients.transpose() * gradients / static_cast<double>(n);
  const SymmetricEigen<double> eig = eigh_symmetric(cov);
  AsSubspace s;
  s.eigenvalues = eig.values.cwiseMax(0.0);
  s.eigenvectors = eig.vectors;
  s.dim = options.dim;

  std::vector<std::vector<Eigen::Index>> picks = options.resamples;
  if (picks.empty()) {
    picks.resize(static_cast<std::size_t>(std::max(options.bootstrap, 0)));
    for (std::size_t b = 0; b < picks.size(); ++b) {
      Rng rng = Rng::derive(options.seed, "as-bootstrap", b);
      picks[b].resize(static_cast<std::size_t>(n));
      for (auto& r : picks[b]) r = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
  }
  for (const auto& p : picks) {
    if (p.empty()) throw DimensionError("as_fit: empty bootstrap resample");
    for (Eigen::Index r : p)
      if (r < 0 || r >= n) throw IndexError("as_fit: bootstrap row out of range");
  }
  if (picks.empty()) return s;

  std::vector<Vector> reps(picks.size());
  parallel_for(picks.size(), options.threads, [&](std::size_t b) { reps[b] = covariance_eigenvalues(gradients, picks[b]); });
  s.band_min = reps.front();
  s.band_max = reps.front();
  s.band_mean = Vector::Zero(reps.front().size());
  for (const Vector& v : reps) {
    s.band_min = s.band_min.cwiseMin(v);
    s.band_max = s.band_max.cwiseMax(v);
    s.band_mean += v;
  }
  s.band_mean /= static_cast<double>(reps.size());
  return s;
}

AsResponseSurface as_response_surface(const AsSubspace& subspace, const Matrix& mu, const Vector& f,
                                      const GprOptions& options) {
  if (mu.cols() != subspace.eigenvectors.rows()) throw DimensionError("as_response_surface: input width mismatch");
  AsResponseSurface rs;
  rs.subspace = subspace;
  rs.gpr = gpr_fit(subspace.project(mu), f, options);
  return rs;
}

Matrix fd_gradients(const std::function<double(const Vector&)>& f, const Matrix& mu, double h) {
  if (!(h > 0.0)) throw ConfigError("fd_gradients: step must be positive");
  Matrix g(mu.rows(), mu.cols());
  for (Eigen::Index i = 0; i < mu.rows(); ++i) {
    Vector x = mu.row(i).transpose();
    for (Eigen::Index j = 0; j < mu.cols(); ++j) {
      const double keep = x[j];
      x[j] = keep + h;
      const double fp = f(x);
      x[j] = keep - h;
      const double fm = f(x);
      x[j] = keep;
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

} // namespace cgm
