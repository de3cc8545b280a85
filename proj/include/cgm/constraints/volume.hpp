#pragma once

#include <array>

#include "cgm/geometry/surface.hpp"

namespace cgm {

/// With the other two coordinates fixed, the enclosed volume is affine in
/// one coordinate column: V = row . coords(component) + offset.
struct VolumeRow {
  Vector row;
  double offset = 0.0;
};

VolumeRow volume_constraint_row(const TriSurface& surface, int component);
/// Unchecked variant for hot loops; the caller guarantees a closed surface.
VolumeRow volume_row(const Points& vertices, const Faces& faces, int component);

enum class VolumeSplit {
  first_pass,  // the first component in the order absorbs the whole deficit
  equal_thirds // each pass closes one third of the initial deficit
};

struct VolumeEnforcement {
  std::array<int, 3> order{0, 1, 2};
  VolumeSplit split = VolumeSplit::first_pass;
};

/// Sequential per-component minimum-norm corrections reaching `target` volume.
TriSurface enforce_volume(const TriSurface& surface, double target, const VolumeEnforcement& how = {});

/// Vertex-level pass used by enforce_volume. Returns the unit rows used in
/// each executed pass (for gradient projection), in pass order.
struct VolumePass {
  int component;
  Vector unit_row;
};
std::vector<VolumePass> enforce_volume_in_place(Points& vertices, const Faces& faces, double target,
                                                const VolumeEnforcement& how = {});

} // namespace cgm
