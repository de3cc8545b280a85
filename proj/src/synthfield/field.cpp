#include "cgm/synthfield/field.hpp"

#include <cmath>

namespace cgm {

std::string to_string(FieldKind kind) { return kind == FieldKind::bump ? "bump" : "multibump"; }

FieldKind field_kind_from_string(const std::string& name) {
  if (name == "bump") return FieldKind::bump;
  if (name == "multibump") return FieldKind::multibump;
  throw ConfigError("unknown field kind '" + name + "'");
}

namespace {

Vector bump(const Points& v, const Vec3& center, double scale) {
  return (-(v.rowwise() - center.transpose()).rowwise().squaredNorm() / scale).array().exp().matrix();
}

} // namespace

Vector snapshot_of(const TriSurface& surface, const FieldSpec& spec) {
  if (!(spec.scale > 0.0)) throw ConfigError("snapshot_of: field scale must be positive");
  surface.validate();
  const Points& v = surface.vertices;
  const Vec3 xb = barycenter_of(v);
  if (spec.kind == FieldKind::bump) return bump(v, xb, spec.scale);

  const Vec3 gyration =
      ((v.rowwise() - xb.transpose()).array().square().colwise().mean()).sqrt().transpose();
  Vector out = Vector::Zero(v.rows());
  for (int d = 0; d < 3; ++d)
    for (double sign : {-1.0, 1.0}) out += bump(v, xb + sign * gyration[d] * Vec3::Unit(d), spec.scale);
  return out / 6.0;
}

} // namespace cgm
