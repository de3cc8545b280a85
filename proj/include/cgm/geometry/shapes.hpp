#pragma once

#include "cgm/geometry/surface.hpp"

namespace cgm {

enum class ShapeKind { icosphere, ellipsoid };

/// Subdivided icosahedron projected onto the unit sphere, then scaled by
/// `radii` (ellipsoid) or left unit (icosphere). Closed, outward CCW, vertex
/// count 10 * 4^subdivision + 2, vertices in canonical order.
TriSurface synth_shape(ShapeKind kind, int subdivision, const Vec3& radii = Vec3::Ones());

} // namespace cgm
