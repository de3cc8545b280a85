#pragma once

#include <string>

#include <Eigen/Dense>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

template <typename Scalar>
using PointsX = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Points = PointsX<double>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Row-wise vectorization (x0, y0, z0, x1, ...) of an M x 3 point array.
inline Vector flatten(const Points& p) { return Eigen::Map<const Vector>(p.data(), p.size()); }

inline Points unflatten(const Eigen::Ref<const Vector>& v) {
  if (v.size() % 3 != 0) throw DimensionError("unflatten: length is not a multiple of 3");
  return Eigen::Map<const Points>(v.data(), v.size() / 3, 3);
}

/// Triangulated surface; faces are counter-clockwise seen from outside.
struct TriSurface {
  Points vertices;
  Faces faces;

  Eigen::Index vertex_count() const { return vertices.rows(); }
  Eigen::Index face_count() const { return faces.rows(); }

  /// Throws if an index is out of range or a face repeats a vertex.
  void validate() const;
  /// True when every undirected edge is used by exactly two faces in
  /// opposite directions.
  bool is_closed() const;
};

/// Renumbers vertices in order of first appearance in the face list and drops
/// unreferenced ones. ASCII STL round trips preserve this order.
TriSurface canonical_vertex_order(const TriSurface& s);

/// Signed enclosed volume (1/6) sum v_a . (v_b x v_c); no topology checks.
template <typename Derived>
typename Derived::Scalar signed_volume(const Eigen::MatrixBase<Derived>& vertices, const Faces& faces) {
  using Scalar = typename Derived::Scalar;
  Scalar sum(0);
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    const auto a = vertices.row(faces(f, 0));
    const auto b = vertices.row(faces(f, 1));
    const auto c = vertices.row(faces(f, 2));
    sum += a(0) * (b(1) * c(2) - b(2) * c(1)) - a(1) * (b(0) * c(2) - b(2) * c(0)) + a(2) * (b(0) * c(1) - b(1) * c(0));
  }
  return sum / Scalar(6);
}

/// d(signed_volume)/d(vertex), one row per vertex.
template <typename Derived>
PointsX<typename Derived::Scalar> volume_gradient(const Eigen::MatrixBase<Derived>& vertices, const Faces& faces) {
  using Scalar = typename Derived::Scalar;
  using V3 = Eigen::Matrix<Scalar, 3, 1>;
  PointsX<Scalar> grad = PointsX<Scalar>::Zero(vertices.rows(), 3);
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    const V3 a = vertices.row(faces(f, 0)).transpose();
    const V3 b = vertices.row(faces(f, 1)).transpose();
    const V3 c = vertices.row(faces(f, 2)).transpose();
    grad.row(faces(f, 0)) += b.cross(c).transpose() / Scalar(6);
    grad.row(faces(f, 1)) += c.cross(a).transpose() / Scalar(6);
    grad.row(faces(f, 2)) += a.cross(b).transpose() / Scalar(6);
  }
  return grad;
}

/// Enclosed volume of a closed, consistently oriented surface.
double volume_of(const TriSurface& s);

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 1> barycenter_of(const Eigen::MatrixBase<Derived>& cloud) {
  if (cloud.rows() == 0) throw DimensionError("barycenter_of: empty cloud");
  return cloud.colwise().mean().transpose();
}

template <typename Derived>
typename Derived::Scalar surface_area(const Eigen::MatrixBase<Derived>& vertices, const Faces& faces) {
  using Scalar = typename Derived::Scalar;
  using V3 = Eigen::Matrix<Scalar, 3, 1>;
  Scalar area(0);
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    const V3 a = vertices.row(faces(f, 0)).transpose();
    const V3 b = vertices.row(faces(f, 1)).transpose();
    const V3 c = vertices.row(faces(f, 2)).transpose();
    area += (b - a).cross(c - a).norm() / Scalar(2);
  }
  return area;
}

inline double surface_area_of(const TriSurface& s) { return surface_area(s.vertices, s.faces); }

/// Discrete inertia tensor with unit mass per point, relative to `center`:
/// diagonal I_xx = sum(y^2 + z^2) etc., off-diagonal I_xy = sum(x y) etc.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3>
inertia_tensor_of(const Eigen::MatrixBase<Derived>& cloud,
                  const Eigen::Matrix<typename Derived::Scalar, 3, 1>& center) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, 3, 3> second = Eigen::Matrix<Scalar, 3, 3>::Zero();
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    const Eigen::Matrix<Scalar, 3, 1> r = cloud.row(i).transpose() - center;
    second.noalias() += r * r.transpose();
  }
  Eigen::Matrix<Scalar, 3, 3> inertia = second;
  const Scalar trace = second.trace();
  for (int d = 0; d < 3; ++d) inertia(d, d) = trace - second(d, d);
  return inertia;
}

} // namespace cgm
