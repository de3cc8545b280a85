#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "cgm/error.hpp"

namespace cgm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Relative singular-value cutoff below which directions count as null.
inline constexpr double kRankTolerance = 1e-12;

template <typename Scalar>
struct SymmetricEigen {
  VectorX<Scalar> values;  // descending
  MatrixX<Scalar> vectors; // column i pairs with values[i]
};

/// Flips each column so that its largest-magnitude entry is nonnegative.
template <typename Derived>
void canonicalize_column_signs(Eigen::MatrixBase<Derived>& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0) vectors.col(j) = -vectors.col(j);
  }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> eigh_symmetric(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw DimensionError("eigh_symmetric: matrix is not square");
  const Scalar scale = m.cwiseAbs().maxCoeff();
  const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-10) * std::max(scale, Scalar(1)))
    throw SymmetryError("eigh_symmetric: matrix is not symmetric");

  const MatrixX<Scalar> sym = (m + m.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eigh_symmetric: solver did not converge");

  const Eigen::Index n = sym.rows();
  SymmetricEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  canonicalize_column_signs(out.vectors);
  return out;
}

/// Minimum-norm solver for a fixed underdetermined system `a x = b`.
///
/// Precomputes the pseudo-inverse through a thin SVD; singular values below
/// `kRankTolerance * sigma_max` are dropped. `solve` rejects right-hand sides
/// that are inconsistent with the retained range.
template <typename Scalar>
class MinNormSolver {
public:
  MinNormSolver() = default;

  explicit MinNormSolver(const MatrixX<Scalar>& a) : a_(a) {
    pinv_.setZero(a.cols(), a.rows());
    if (a.size() == 0) return;
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const Scalar cutoff = Scalar(kRankTolerance) * (sigma.size() ? sigma[0] : Scalar(0));
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma[i] > cutoff && sigma[i] > Scalar(0)) {
        pinv_.noalias() += svd.matrixV().col(i) * (svd.matrixU().col(i).transpose() / sigma[i]);
        ++rank_;
      }
    }
  }

  const MatrixX<Scalar>& matrix() const { return a_; }
  const MatrixX<Scalar>& pseudo_inverse() const { return pinv_; }
  Eigen::Index rank() const { return rank_; }

  VectorX<Scalar> solve(const VectorX<Scalar>& b) const {
    if (b.size() != a_.rows()) throw DimensionError("MinNormSolver: right-hand side has wrong length");
    VectorX<Scalar> x = pinv_ * b;
    const Scalar residual = (a_ * x - b).norm();
    if (residual > Scalar(1e-9) * (Scalar(1) + b.norm()))
      throw InfeasibleError("MinNormSolver: system is inconsistent (residual " + std::to_string(double(residual)) +
                            ")");
    return x;
  }

  /// Orthogonal projector onto the null space of `a`, i.e. I - a^+ a.
  MatrixX<Scalar> null_projector() const {
    MatrixX<Scalar> p = -pinv_ * a_;
    p.diagonal().array() += Scalar(1);
    return p;
  }

private:
  MatrixX<Scalar> a_;
  MatrixX<Scalar> pinv_;
  Eigen::Index rank_ = 0;
};

/// x minimizing ||x|| subject to a x = b.
template <typename Scalar>
VectorX<Scalar> lstsq_min_norm(const MatrixX<Scalar>& a, const VectorX<Scalar>& b) {
  return MinNormSolver<Scalar>(a).solve(b);
}

/// x minimizing ||diag(weights) x|| subject to a x = b, via y = diag(weights) x.
template <typename Scalar>
VectorX<Scalar> lstsq_min_norm(const MatrixX<Scalar>& a, const VectorX<Scalar>& b, const VectorX<Scalar>& weights) {
  if (weights.size() != a.cols()) throw DimensionError("lstsq_min_norm: weights length must equal column count");
  if ((weights.array() <= Scalar(0)).any() || !weights.allFinite())
    throw DimensionError("lstsq_min_norm: weights must be strictly positive and finite");
  const VectorX<Scalar> inv_w = weights.cwiseInverse();
  const MatrixX<Scalar> scaled = a * inv_w.asDiagonal();
  return inv_w.cwiseProduct(lstsq_min_norm<Scalar>(scaled, b));
}

} // namespace cgm
