#pragma once

#include <string>

#include "cgm/geometry/surface.hpp"

namespace cgm {

enum class FieldKind {
  bump,     // exp(-|v - x_B|^2 / s)
  multibump // sum over d of the bumps at x_B +- g_d e_d, g_d the gyration radius along axis d
};

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

struct FieldSpec {
  FieldKind kind = FieldKind::bump;
  double scale = 1.0; // s > 0
};

/// Scalar field sampled at every vertex of `surface`.
Vector snapshot_of(const TriSurface& surface, const FieldSpec& spec);

} // namespace cgm
