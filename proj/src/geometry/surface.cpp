#include "cgm/geometry/surface.hpp"

#include <map>
#include <utility>
#include <vector>

namespace cgm {

void TriSurface::validate() const {
  const Eigen::Index n = vertices.rows();
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k)
      if (faces(f, k) < 0 || faces(f, k) >= n)
        throw IndexError("TriSurface: face " + std::to_string(f) + " references a missing vertex");
    if (faces(f, 0) == faces(f, 1) || faces(f, 1) == faces(f, 2) || faces(f, 0) == faces(f, 2))
      throw DegenerateError("TriSurface: face " + std::to_string(f) + " repeats a vertex");
  }
  if (!vertices.allFinite()) throw DegenerateError("TriSurface: non-finite vertex coordinate");
}

bool TriSurface::is_closed() const {
  if (faces.rows() == 0) return false;
  // Directed edge counts; a closed oriented surface uses each directed edge
  // once and its reverse once.
  std::map<std::pair<int, int>, int> directed;
  for (Eigen::Index f = 0; f < faces.rows(); ++f)
    for (int k = 0; k < 3; ++k) ++directed[{faces(f, k), faces(f, (k + 1) % 3)}];
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end() || rev->second != 1) return false;
  }
  return true;
}

TriSurface canonical_vertex_order(const TriSurface& s) {
  s.validate();
  std::vector<int> remap(static_cast<std::size_t>(s.vertices.rows()), -1);
  std::vector<int> order;
  TriSurface out;
  out.faces.resize(s.faces.rows(), 3);
  for (Eigen::Index f = 0; f < s.faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int& slot = remap[static_cast<std::size_t>(s.faces(f, k))];
      if (slot < 0) {
        slot = static_cast<int>(order.size());
        order.push_back(s.faces(f, k));
      }
      out.faces(f, k) = slot;
    }
  }
  out.vertices.resize(static_cast<Eigen::Index>(order.size()), 3);
  for (std::size_t i = 0; i < order.size(); ++i) out.vertices.row(static_cast<Eigen::Index>(i)) = s.vertices.row(order[i]);
  return out;
}

double volume_of(const TriSurface& s) {
  s.validate();
  if (!s.is_closed()) throw OrientationError("volume_of: surface is not closed and consistently oriented");
  return signed_volume(s.vertices, s.faces);
}

} // namespace cgm
