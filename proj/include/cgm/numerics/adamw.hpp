#pragma once

#include <span>
#include <vector>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

/// AdamW with decoupled weight decay:
/// theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * theta).
class AdamW {
public:
  AdamW() = default;
  explicit AdamW(AdamWConfig config) : config_(config) {}

  const AdamWConfig& config() const { return config_; }
  long step_count() const { return t_; }

  /// Moment buffers are created (zeroed) on the first call and must keep the
  /// same shapes afterwards.
  void step(std::span<Matrix* const> params, std::span<const Matrix> grads);

  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

private:
  AdamWConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

} // namespace cgm
