#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgm/numerics/mlp.hpp"
#include "cgm/reduction/gpr.hpp"
#include "cgm/reduction/pca.hpp"
#include "cgm/reduction/rbf.hpp"

namespace cgm {

enum class PodiRegressor { rbf, gpr, nn };

std::string to_string(PodiRegressor r);
PodiRegressor podi_regressor_from_string(const std::string& name);

struct NnRegressorOptions {
  int width = 64;
  int depth = 2;
  int epochs = 1000;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

/// ReLU MLP on standardized inputs and outputs, trained full-batch with AdamW.
struct NnRegressor {
  Mlp net;
  Vector in_mean, in_scale, out_mean, out_scale;

  Matrix predict(const Matrix& x) const;
};

NnRegressor nn_fit(const Matrix& x, const Matrix& y, const NnRegressorOptions& options);

struct PodiOptions {
  int modes = 3;
  PodiRegressor regressor = PodiRegressor::rbf;
  RbfKernel kernel = RbfKernel::polyharmonic_linear;
  double rbf_shape = 1.0;
  GprOptions gpr;
  NnRegressorOptions nn;
};

struct PodiModel {
  PcaBasis pod;
  PodiRegressor regressor = PodiRegressor::rbf;
  Eigen::Index input_dim = 0;
  RbfInterpolant rbf;
  std::vector<GprModel> gpr; // one per POD coefficient
  NnRegressor nn;

  Matrix coefficients(const Matrix& inputs) const;
  Matrix predict(const Matrix& inputs) const;
};

PodiModel podi_fit(const Matrix& inputs, const Matrix& snapshots, const PodiOptions& options);
inline Matrix podi_predict(const PodiModel& model, const Matrix& inputs) { return model.predict(inputs); }

/// Mean over rows of |truth_i - predicted_i| / |truth_i|.
double mean_relative_error(const Matrix& truth, const Matrix& predicted);

} // namespace cgm
