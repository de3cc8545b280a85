#include "cgm/numerics/mlp.hpp"

#include <cmath>

namespace cgm {

namespace {

Matrix apply_activation(Activation a, const Matrix& z) {
  switch (a) {
  case Activation::relu:
    return z.cwiseMax(0.0);
  case Activation::sigmoid:
    return (1.0 + (-z.array()).exp()).inverse().matrix();
  case Activation::identity:
    break;
  }
  return z;
}

} // namespace

std::vector<Matrix> MlpGradients::flat() const {
  std::vector<Matrix> out;
  for (const auto& g : layers) {
    out.push_back(g.weight);
    out.push_back(g.bias);
    if (g.bn_scale.size()) {
      out.push_back(g.bn_scale);
      out.push_back(g.bn_shift);
    }
  }
  return out;
}

MlpGradients& MlpGradients::operator+=(const MlpGradients& other) {
  if (other.layers.size() != layers.size()) throw DimensionError("MlpGradients: layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
    if (layers[i].bn_scale.size()) {
      layers[i].bn_scale += other.layers[i].bn_scale;
      layers[i].bn_shift += other.layers[i].bn_shift;
    }
  }
  return *this;
}

Mlp::Mlp(const std::vector<LayerSpec>& specs, Rng& init_rng) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& s = specs[i];
    if (s.in <= 0 || s.out <= 0) throw DimensionError("Mlp: layer dimensions must be positive");
    if (i > 0 && specs[i - 1].out != s.in) throw DimensionError("Mlp: consecutive layer dimensions do not chain");
    if (!(s.dropout >= 0.0 && s.dropout < 1.0)) throw DimensionError("Mlp: dropout rate must lie in [0, 1)");
    MlpLayer layer;
    layer.spec = s;
    const double bound = std::sqrt(6.0 / s.in);
    layer.weight = init_rng.uniform_matrix(s.out, s.in, -bound, bound);
    layer.bias = Matrix::Zero(s.out, 1);
    if (s.norm != Norm::none) {
      layer.bn_scale = Matrix::Ones(s.out, 1);
      layer.bn_shift = Matrix::Zero(s.out, 1);
      layer.running_mean = Vector::Zero(s.out);
      layer.running_var = Vector::Ones(s.out);
    }
    layers_.push_back(std::move(layer));
  }
}

int Mlp::in_dim() const { return layers_.empty() ? 0 : layers_.front().spec.in; }
int Mlp::out_dim() const { return layers_.empty() ? 0 : layers_.back().spec.out; }

Matrix Mlp::run_layer(const MlpLayer& layer, const Matrix& x, Mode mode, Rng* rng, LayerCache* cache) const {
  Matrix z = x * layer.weight.transpose();
  z.rowwise() += layer.bias.col(0).transpose();

  const Eigen::Index batch = z.rows();
  Matrix xhat;
  Vector inv_std;
  if (layer.has_norm()) {
    Vector mean, var;
    if (mode == Mode::train) {
      if (batch < 2) throw DegenerateError("Mlp: batch normalization in train mode needs at least 2 samples");
      mean = z.colwise().mean().transpose();
      var = (z.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    } else {
      mean = layer.running_mean;
      var = layer.running_var;
    }
    inv_std = (var.array() + kBatchNormEps).rsqrt().matrix();
    xhat = ((z.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array()).matrix();
    z = xhat;
    if (layer.affine()) {
      z = (z.array().rowwise() * layer.bn_scale.col(0).transpose().array()).matrix();
      z.rowwise() += layer.bn_shift.col(0).transpose();
    }
  }

  Matrix a = apply_activation(layer.spec.activation, z);

  Matrix mask;
  if (mode == Mode::train && layer.spec.dropout > 0.0) {
    const double keep = 1.0 - layer.spec.dropout;
    mask.resize(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i)
      for (Eigen::Index j = 0; j < mask.cols(); ++j) mask(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
    a = a.cwiseProduct(mask);
  }

  if (cache) {
    cache->input = x;
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
    cache->pre_act = z;
    cache->activated = apply_activation(layer.spec.activation, z);
    cache->mask = std::move(mask);
  }
  return a;
}

MlpForward Mlp::forward(const Matrix& batch, Rng& rng) {
  if (batch.cols() != in_dim()) throw DimensionError("Mlp::forward: batch width does not match input layer");
  MlpForward out;
  out.cache.mode = mode_;
  out.cache.version = version_;
  out.cache.owner = this;
  out.cache.layers.resize(layers_.size());
  Matrix x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    MlpLayer& layer = layers_[i];
    x = run_layer(layer, x, mode_, &rng, &out.cache.layers[i]);
    if (mode_ == Mode::train && layer.has_norm()) {
      const Matrix& in = out.cache.layers[i].input;
      Matrix z = in * layer.weight.transpose();
      z.rowwise() += layer.bias.col(0).transpose();
      const Vector mean = z.colwise().mean().transpose();
      const double n = static_cast<double>(z.rows());
      const Vector unbiased =
          (z.rowwise() - mean.transpose()).array().square().colwise().sum().transpose() / (n - 1.0);
      layer.running_mean = (1.0 - kBatchNormMomentum) * layer.running_mean + kBatchNormMomentum * mean;
      layer.running_var = (1.0 - kBatchNormMomentum) * layer.running_var + kBatchNormMomentum * unbiased;
    }
  }
  out.output = std::move(x);
  return out;
}

Matrix Mlp::predict(const Matrix& batch) const {
  if (batch.cols() != in_dim()) throw DimensionError("Mlp::predict: batch width does not match input layer");
  Matrix x = batch;
  for (const auto& layer : layers_) x = run_layer(layer, x, Mode::eval, nullptr, nullptr);
  return x;
}

MlpGradients Mlp::backward(const MlpCache& cache, const Matrix& output_grad) const {
  if (cache.owner != this || cache.version != version_ || cache.layers.size() != layers_.size())
    throw CacheMismatchError("Mlp::backward: cache does not belong to the current parameters");

  MlpGradients grads;
  grads.layers.resize(layers_.size());
  Matrix g = output_grad;
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const MlpLayer& layer = layers_[idx];
    const LayerCache& c = cache.layers[idx];
    if (g.rows() != c.input.rows() || g.cols() != layer.spec.out)
      throw DimensionError("Mlp::backward: output gradient has wrong shape");
    LayerGradients& lg = grads.layers[idx];

    if (c.mask.size()) g = g.cwiseProduct(c.mask);

    switch (layer.spec.activation) {
    case Activation::relu:
      g = (c.pre_act.array() > 0.0).select(g.array(), 0.0).matrix();
      break;
    case Activation::sigmoid:
      g = (g.array() * c.activated.array() * (1.0 - c.activated.array())).matrix();
      break;
    case Activation::identity:
      break;
    }

    if (layer.has_norm()) {
      Matrix dxhat = g;
      if (layer.affine()) {
        lg.bn_scale = (g.cwiseProduct(c.xhat)).colwise().sum().transpose();
        lg.bn_shift = g.colwise().sum().transpose();
        dxhat = (g.array().rowwise() * layer.bn_scale.col(0).transpose().array()).matrix();
      }
      if (cache.mode == Mode::train) {
        const double n = static_cast<double>(g.rows());
        const Eigen::RowVectorXd sum_d = dxhat.colwise().sum();
        const Eigen::RowVectorXd sum_dx = dxhat.cwiseProduct(c.xhat).colwise().sum();
        Matrix centered = (n * dxhat).rowwise() - sum_d;
        centered -= (c.xhat.array().rowwise() * sum_dx.array()).matrix();
        g = ((centered.array().rowwise() * c.inv_std.transpose().array()) / n).matrix();
      } else {
        g = (dxhat.array().rowwise() * c.inv_std.transpose().array()).matrix();
      }
    }

    lg.weight = g.transpose() * c.input;
    lg.bias = g.colwise().sum().transpose();
    g = g * layer.weight;
  }
  grads.input = std::move(g);
  return grads;
}

std::vector<Matrix*> Mlp::parameters() {
  ++version_;
  std::vector<Matrix*> out;
  for (auto& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
    if (layer.affine()) {
      out.push_back(&layer.bn_scale);
      out.push_back(&layer.bn_shift);
    }
  }
  return out;
}

std::vector<const Matrix*> Mlp::parameters() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
    if (layer.affine()) {
      out.push_back(&layer.bn_scale);
      out.push_back(&layer.bn_shift);
    }
  }
  return out;
}

std::vector<LayerSpec> mlp_stack(int in, int hidden, int depth, int out, Norm hidden_norm, double dropout,
                                 Norm out_norm, Activation out_activation) {
  std::vector<LayerSpec> specs;
  int width = in;
  for (int i = 0; i < depth; ++i) {
    specs.push_back({width, hidden, hidden_norm, Activation::relu, dropout});
    width = hidden;
  }
  specs.push_back({width, out, out_norm, out_activation, 0.0});
  return specs;
}

} // namespace cgm
