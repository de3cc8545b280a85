#include "cgm/constraints/volume.hpp"

#include <cmath>
#include <set>

namespace cgm {

VolumeRow volume_row(const Points& vertices, const Faces& faces, int component) {
  if (component < 0 || component > 2) throw IndexError("volume_row: component must be 0, 1 or 2");
  VolumeRow r;
  r.row = volume_gradient(vertices, faces).col(component);
  r.offset = signed_volume(vertices, faces) - r.row.dot(vertices.col(component));
  return r;
}

VolumeRow volume_constraint_row(const TriSurface& surface, int component) {
  surface.validate();
  if (!surface.is_closed()) throw OrientationError("volume_constraint_row: surface is not closed and oriented");
  return volume_row(surface.vertices, surface.faces, component);
}

std::vector<VolumePass> enforce_volume_in_place(Points& vertices, const Faces& faces, double target,
                                                const VolumeEnforcement& how) {
  const std::set<int> distinct(how.order.begin(), how.order.end());
  if (distinct != std::set<int>{0, 1, 2}) throw ConfigError("enforce_volume: order must permute {0, 1, 2}");
  if (!std::isfinite(target)) throw ConfigError("enforce_volume: non-finite target");

  const double start = signed_volume(vertices, faces);
  const int passes = how.split == VolumeSplit::first_pass ? 1 : 3;
  std::vector<VolumePass> used;
  for (int p = 0; p < passes; ++p) {
    const int component = how.order[static_cast<std::size_t>(p)];
    const double goal = how.split == VolumeSplit::first_pass ? target : start + (target - start) * (p + 1) / 3.0;
    const VolumeRow r = volume_row(vertices, faces, component);
    const double norm2 = r.row.squaredNorm();
    if (!(norm2 > 0.0)) throw DegenerateError("enforce_volume: volume constraint row vanishes");
    const double current = r.row.dot(vertices.col(component)) + r.offset;
    vertices.col(component) += r.row * ((goal - current) / norm2);
    used.push_back({component, r.row / std::sqrt(norm2)});
  }
  return used;
}

TriSurface enforce_volume(const TriSurface& surface, double target, const VolumeEnforcement& how) {
  surface.validate();
  if (!surface.is_closed()) throw OrientationError("enforce_volume: surface is not closed and oriented");
  TriSurface out = surface;
  enforce_volume_in_place(out.vertices, out.faces, target, how);
  return out;
}

} // namespace cgm
