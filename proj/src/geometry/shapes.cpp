#include "cgm/geometry/shapes.hpp"

#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace cgm {

namespace {

TriSurface icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriSurface s;
  s.vertices.resize(12, 3);
  s.vertices << -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, 0, 0, -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, t, 0, -1, t, 0, 1,
      -t, 0, -1, -t, 0, 1;
  s.faces.resize(20, 3);
  s.faces << 0, 11, 5, 0, 5, 1, 0, 1, 7, 0, 7, 10, 0, 10, 11, 1, 5, 9, 5, 11, 4, 11, 10, 2, 10, 7, 6, 7, 1, 8, 3, 9, 4,
      3, 4, 2, 3, 2, 6, 3, 6, 8, 3, 8, 9, 4, 9, 5, 2, 4, 11, 6, 2, 10, 8, 6, 7, 9, 8, 1;
  s.vertices.rowwise().normalize();
  return s;
}

TriSurface subdivide(const TriSurface& in) {
  std::vector<Vec3> verts;
  for (Eigen::Index i = 0; i < in.vertices.rows(); ++i) verts.push_back(in.vertices.row(i).transpose());
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(verts.size());
    verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
    midpoint.emplace(key, idx);
    return idx;
  };
  TriSurface out;
  out.faces.resize(in.faces.rows() * 4, 3);
  for (Eigen::Index f = 0; f < in.faces.rows(); ++f) {
    const int a = in.faces(f, 0), b = in.faces(f, 1), c = in.faces(f, 2);
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    out.faces.row(4 * f + 0) << a, ab, ca;
    out.faces.row(4 * f + 1) << b, bc, ab;
    out.faces.row(4 * f + 2) << c, ca, bc;
    out.faces.row(4 * f + 3) << ab, bc, ca;
  }
  out.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) out.vertices.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
  return out;
}

} // namespace

TriSurface synth_shape(ShapeKind kind, int subdivision, const Vec3& radii) {
  if (subdivision < 0 || subdivision > 6) throw ConfigError("synth_shape: subdivision must lie in [0, 6]");
  TriSurface s = icosahedron();
  for (int i = 0; i < subdivision; ++i) s = subdivide(s);
  if (kind == ShapeKind::ellipsoid) {
    if ((radii.array() <= 0.0).any()) throw ConfigError("synth_shape: radii must be positive");
    s.vertices = s.vertices * radii.asDiagonal();
  }
  return canonical_vertex_order(s);
}

} // namespace cgm
