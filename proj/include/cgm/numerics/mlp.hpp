#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgm/numerics/linalg.hpp"
#include "cgm/numerics/rng.hpp"

namespace cgm {

enum class Activation { identity, relu, sigmoid };
enum class Norm { none, batch_affine, batch_plain };
enum class Mode { train, eval };

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

struct LayerSpec {
  int in = 0;
  int out = 0;
  Norm norm = Norm::none;
  Activation activation = Activation::identity;
  double dropout = 0.0;
};

/// Hidden unit in the order linear -> normalization -> activation -> dropout.
struct MlpLayer {
  LayerSpec spec;
  Matrix weight;       // out x in
  Matrix bias;         // out x 1
  Matrix bn_scale;     // out x 1, trainable only for batch_affine
  Matrix bn_shift;     // out x 1, trainable only for batch_affine
  Vector running_mean; // out
  Vector running_var;  // out

  bool has_norm() const { return spec.norm != Norm::none; }
  bool affine() const { return spec.norm == Norm::batch_affine; }
};

struct LayerCache {
  Matrix input;     // B x in
  Matrix xhat;      // normalized pre-activation, B x out
  Vector inv_std;   // per feature
  Matrix pre_act;   // input to the activation
  Matrix activated; // activation output
  Matrix mask;      // dropout mask with inverted scaling folded in; empty if unused
};

struct MlpCache {
  std::vector<LayerCache> layers;
  Mode mode = Mode::eval;
  std::uint64_t version = 0;
  const void* owner = nullptr;
};

struct LayerGradients {
  Matrix weight;
  Matrix bias;
  Matrix bn_scale; // empty unless the layer is batch_affine
  Matrix bn_shift;
};

struct MlpGradients {
  std::vector<LayerGradients> layers;
  Matrix input; // gradient with respect to the batch

  /// Same order as Mlp::parameters().
  std::vector<Matrix> flat() const;
  MlpGradients& operator+=(const MlpGradients& other);
};

struct MlpForward {
  Matrix output;
  MlpCache cache;
};

/// Feed-forward stack with manual backpropagation.
class Mlp {
public:
  Mlp() = default;
  /// Weights uniform in +-sqrt(6/fan_in), biases zero, batch-norm scale 1 shift 0.
  Mlp(const std::vector<LayerSpec>& specs, Rng& init_rng);

  int in_dim() const;
  int out_dim() const;
  std::size_t depth() const { return layers_.size(); }

  Mode mode() const { return mode_; }
  void set_mode(Mode m) { mode_ = m; }

  /// Runs the batch (rows are samples). Train mode uses batch statistics,
  /// updates running statistics and samples dropout masks from `rng`.
  MlpForward forward(const Matrix& batch, Rng& rng);
  /// Eval-mode evaluation without cache or state change.
  Matrix predict(const Matrix& batch) const;

  /// Parameter and input gradients for a cached forward pass.
  MlpGradients backward(const MlpCache& cache, const Matrix& output_grad) const;

  /// Trainable tensors in a fixed order. Mutable access invalidates caches.
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;

  const std::vector<MlpLayer>& layers() const { return layers_; }
  std::vector<MlpLayer>& mutable_layers() {
    ++version_;
    return layers_;
  }

private:
  Matrix run_layer(const MlpLayer& layer, const Matrix& x, Mode mode, Rng* rng, LayerCache* cache) const;

  std::vector<MlpLayer> layers_;
  Mode mode_ = Mode::train;
  std::uint64_t version_ = 0;
};

/// Builds `depth` hidden units of width `hidden` followed by an output layer.
std::vector<LayerSpec> mlp_stack(int in, int hidden, int depth, int out, Norm hidden_norm, double dropout,
                                 Norm out_norm = Norm::none, Activation out_activation = Activation::identity);

} // namespace cgm
