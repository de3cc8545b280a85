#include "cgm/reduction/podi.hpp"

#include <cmath>

#include "cgm/numerics/adamw.hpp"

namespace cgm {

std::string to_string(PodiRegressor r) {
  switch (r) {
  case PodiRegressor::rbf:
    return "rbf";
  case PodiRegressor::gpr:
    return "gpr";
  case PodiRegressor::nn:
    return "nn";
  }
  return "?";
}

PodiRegressor podi_regressor_from_string(const std::string& name) {
  if (name == "rbf") return PodiRegressor::rbf;
  if (name == "gpr") return PodiRegressor::gpr;
  if (name == "nn") return PodiRegressor::nn;
  throw ConfigError("unknown regressor '" + name + "'");
}

namespace {

void standardize_stats(const Matrix& x, Vector& mean, Vector& scale) {
  mean = x.colwise().mean().transpose();
  scale = ((x.rowwise() - mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (!(scale[j] > 1e-12)) scale[j] = 1.0;
}

Matrix standardize(const Matrix& x, const Vector& mean, const Vector& scale) {
  return ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
}

} // namespace

NnRegressor nn_fit(const Matrix& x, const Matrix& y, const NnRegressorOptions& options) {
  if (x.rows() != y.rows()) throw DimensionError("nn_fit: inputs and outputs differ in count");
  if (options.epochs < 1 || options.width < 1 || options.depth < 1) throw ConfigError("nn_fit: bad network options");
  NnRegressor reg;
  standardize_stats(x, reg.in_mean, reg.in_scale);
  standardize_stats(y, reg.out_mean, reg.out_scale);
  const Matrix xs = standardize(x, reg.in_mean, reg.in_scale);
  const Matrix ys = standardize(y, reg.out_mean, reg.out_scale);

  Rng init = Rng::derive(options.seed, "nn-init");
  Rng noise = Rng::derive(options.seed, "nn-train");
  reg.net = Mlp(mlp_stack(static_cast<int>(x.cols()), options.width, options.depth, static_cast<int>(y.cols()),
                          Norm::none, 0.0),
                init);
  AdamWConfig cfg;
  cfg.lr = options.lr;
  AdamW opt(cfg);
  const double n = static_cast<double>(x.rows());
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    MlpForward fw = reg.net.forward(xs, noise);
    const Matrix grad = 2.0 * (fw.output - ys) / n;
    const std::vector<Matrix> g = reg.net.backward(fw.cache, grad).flat();
    const std::vector<Matrix*> params = reg.net.parameters();
    opt.step(params, g);
  }
  reg.net.set_mode(Mode::eval);
  return reg;
}

Matrix NnRegressor::predict(const Matrix& x) const {
  Matrix out = net.predict(standardize(x, in_mean, in_scale));
  out = (out.array().rowwise() * out_scale.transpose().array()).matrix();
  out.rowwise() += out_mean.transpose();
  return out;
}

PodiModel podi_fit(const Matrix& inputs, const Matrix& snapshots, const PodiOptions& options) {
  if (inputs.rows() != snapshots.rows()) throw DimensionError("podi_fit: inputs and snapshots differ in count");
  if (options.modes < 1 || options.modes > inputs.rows())
    throw ConfigError("podi_fit: POD mode count must lie in [1, n]");
  PodiModel model;
  model.regressor = options.regressor;
  model.input_dim = inputs.cols();
  PcaOptions pca;
  pca.modes = options.modes;
  model.pod = pca_fit(snapshots, pca);
  const Matrix coeffs = model.pod.project(snapshots);

  switch (options.regressor) {
  case PodiRegressor::rbf:
    model.rbf = rbf_fit(inputs, coeffs, options.kernel, options.rbf_shape);
    break;
  case PodiRegressor::gpr:
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) model.gpr.push_back(gpr_fit(inputs, coeffs.col(j), options.gpr));
    break;
  case PodiRegressor::nn:
    model.nn = nn_fit(inputs, coeffs, options.nn);
    break;
  }
  return model;
}

Matrix PodiModel::coefficients(const Matrix& inputs) const {
  if (inputs.cols() != input_dim) throw DimensionError("PodiModel: input width does not match training inputs");
  switch (regressor) {
  case PodiRegressor::rbf:
    return rbf.evaluate(inputs);
  case PodiRegressor::gpr: {
    Matrix out(inputs.rows(), static_cast<Eigen::Index>(gpr.size()));
    for (std::size_t j = 0; j < gpr.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = gpr[j].predict(inputs);
    return out;
  }
  case PodiRegressor::nn:
    return nn.predict(inputs);
  }
  return {};
}

Matrix PodiModel::predict(const Matrix& inputs) const { return pod.reconstruct(coefficients(inputs)); }

double mean_relative_error(const Matrix& truth, const Matrix& predicted) {
  if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols())
    throw DimensionError("mean_relative_error: shape mismatch");
  if (truth.rows() == 0) throw DimensionError("mean_relative_error: empty input");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    const double denom = truth.row(i).norm();
    const double err = (truth.row(i) - predicted.row(i)).norm();
    sum += denom > 0.0 ? err / denom : err;
  }
  return sum / static_cast<double>(truth.rows());
}

} // namespace cgm
