#include "cgm/numerics/adamw.hpp"

#include <cmath>

namespace cgm {

void AdamW::step(std::span<Matrix* const> params, std::span<const Matrix> grads) {
  if (params.size() != grads.size()) throw DimensionError("AdamW: parameter and gradient counts differ");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw DimensionError("AdamW: parameter list changed between steps");

  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols() || m_[i].rows() != p.rows() || m_[i].cols() != p.cols())
      throw DimensionError("AdamW: gradient shape does not match parameter");
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    const auto m_hat = m_[i].array() / c1;
    const auto v_hat = v_[i].array() / c2;
    p.array() -= config_.lr * (m_hat / (v_hat.sqrt() + config_.eps) + config_.weight_decay * p.array());
  }
}

} // namespace cgm
