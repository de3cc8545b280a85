#include "cgm/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "cgm/numerics/keyvalue.hpp"

namespace cgm {

PipelineConfig::PipelineConfig() {
  values_ = {
      {"seed", "0"},
      {"threads", "1"},
      {"out", "out"},
      {"shape.kind", "icosphere"},
      {"shape.subdivision", "3"},
      {"shape.radii", "1,1,1"},
      {"lattice.control_points", "3,3,3"},
      {"lattice.origin", "-1.1,-1.1,-1.1"},
      {"lattice.lengths", "2.2,2.2,2.2"},
      {"lattice.affine", ""},
      {"lattice.offset", ""},
      {"lattice.pin_axis", "-1"},
      {"lattice.pin_index", "0"},
      {"constraint.kind", "barycenter"},
      {"constraint.volume_order", "0,1,2"},
      {"constraint.volume_split", "first_pass"},
      {"dataset.n_train", "60"},
      {"dataset.n_test", "60"},
      {"dataset.sigma", "0.05"},
      {"train.dataset", ""},
      {"sample.checkpoint", ""},
      {"sample.n", "100"},
      {"validate.reference", ""},
      {"validate.generated", ""},
      {"validate.quantities", "I_xx,I_yy,I_zz,I_xy,I_xz,I_yz,area"},
      {"surrogate.method", "rbf"},
      {"surrogate.checkpoint", ""},
      {"surrogate.samples", ""},
      {"surrogate.n_train", "80"},
      {"surrogate.n_test", "20"},
      {"surrogate.modes", "3"},
      {"surrogate.field", "bump"},
      {"surrogate.field_scale", "0.5"},
      {"surrogate.kernel", "polyharmonic"},
      {"surrogate.as_dim", "1"},
      {"surrogate.bootstrap", "100"},
      {"surrogate.fd_step", "1e-4"},
      {"surrogate.nn_width", "64"},
      {"surrogate.nn_depth", "2"},
      {"surrogate.nn_epochs", "1000"},
      {"surrogate.nn_lr", "1e-3"},
      {"report.inputs", ""},
  };
  for (const auto& [k, v] : GmConfig{}.to_pairs()) values_["gm." + k] = v;
}

void PipelineConfig::load_text(const std::string& text) {
  for (const auto& [k, v] : parse_key_values(text)) set(k, v);
}

void PipelineConfig::load_file(const std::filesystem::path& path) { load_text(read_text_file(path.string())); }

std::string PipelineConfig::env_name(const std::string& key) {
  std::string out = "CGM_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void PipelineConfig::apply_env(const std::vector<std::string>& env) {
  std::map<std::string, std::string> by_env;
  for (const auto& [k, v] : values_) by_env[env_name(k)] = k;
  for (const auto& entry : env) {
    if (entry.rfind("CGM_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(0, eq);
    const auto it = by_env.find(name);
    if (it == by_env.end()) throw ConfigError("unknown environment override " + name);
    values_[it->second] = trim(entry.substr(eq + 1));
  }
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (!has(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double PipelineConfig::get_double(const std::string& key) const { return parse_double(key, get(key)); }
long PipelineConfig::get_long(const std::string& key) const { return parse_long(key, get(key)); }

std::uint64_t PipelineConfig::get_seed() const {
  const long v = get_long("seed");
  if (v < 0) throw ConfigError("seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> PipelineConfig::get_doubles(const std::string& key) const {
  return get(key).empty() ? std::vector<double>{} : parse_doubles(key, get(key));
}

std::vector<std::string> PipelineConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  for (auto& s : split(get(key), ','))
    if (!s.empty()) out.push_back(s);
  return out;
}

std::filesystem::path PipelineConfig::get_path(const std::string& key) const { return get(key); }

std::string PipelineConfig::resolved_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

void PipelineConfig::write_resolved(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "config.resolved.txt", std::ios::binary);
  if (!out) throw IoError("cannot write config.resolved.txt in " + dir.string());
  out << resolved_text();
}

namespace {

Vec3 vec3_of(const std::string& key, const std::vector<double>& v) {
  if (v.size() != 3) throw ConfigError(key + " needs three comma-separated values");
  return Vec3(v[0], v[1], v[2]);
}

} // namespace

TriSurface PipelineConfig::base_shape() const {
  const std::string& kind = get("shape.kind");
  ShapeKind k;
  if (kind == "icosphere") k = ShapeKind::icosphere;
  else if (kind == "ellipsoid") k = ShapeKind::ellipsoid;
  else throw ConfigError("unknown shape.kind '" + kind + "'");
  return synth_shape(k, static_cast<int>(get_long("shape.subdivision")), vec3_of("shape.radii", get_doubles("shape.radii")));
}

FfdLattice PipelineConfig::lattice() const {
  const Vec3 counts = vec3_of("lattice.control_points", get_doubles("lattice.control_points"));
  std::array<int, 3> grid{};
  for (int d = 0; d < 3; ++d) {
    if (counts[d] < 2 || counts[d] != static_cast<int>(counts[d]))
      throw ConfigError("lattice.control_points must be integers >= 2");
    grid[static_cast<std::size_t>(d)] = static_cast<int>(counts[d]) - 1;
  }
  const auto affine = get_doubles("lattice.affine");
  if (affine.empty()) {
    return FfdLattice::box(grid, vec3_of("lattice.origin", get_doubles("lattice.origin")),
                           vec3_of("lattice.lengths", get_doubles("lattice.lengths")));
  }
  if (affine.size() != 9) throw ConfigError("lattice.affine needs nine row-major values");
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = affine[static_cast<std::size_t>(3 * i + j)];
  const auto offset = get_doubles("lattice.offset");
  return FfdLattice(grid, a, offset.empty() ? Vec3::Zero().eval() : vec3_of("lattice.offset", offset));
}

CffdOptions PipelineConfig::cffd_options(const FfdLattice& lattice) const {
  CffdOptions options;
  const long axis = get_long("lattice.pin_axis");
  if (axis < 0) return options;
  if (axis > 2) throw ConfigError("lattice.pin_axis must be -1, 0, 1 or 2");
  const long layer = get_long("lattice.pin_index");
  if (layer < 0 || layer > lattice.grid()[static_cast<std::size_t>(axis)])
    throw ConfigError("lattice.pin_index is outside the lattice");
  Vector w = Vector::Ones(lattice.control_count());
  for (int c = 0; c < lattice.control_count(); ++c)
    if (lattice.ijk(c)[static_cast<std::size_t>(axis)] == layer) w[c] = 0.0;
  options.weights = w;
  return options;
}

VolumeEnforcement PipelineConfig::volume_how() const {
  VolumeEnforcement how;
  const auto order = get_doubles("constraint.volume_order");
  if (order.size() != 3) throw ConfigError("constraint.volume_order needs three values");
  for (std::size_t i = 0; i < 3; ++i) how.order[i] = static_cast<int>(order[i]);
  const std::string& split_mode = get("constraint.volume_split");
  if (split_mode == "first_pass") how.split = VolumeSplit::first_pass;
  else if (split_mode == "equal_thirds") how.split = VolumeSplit::equal_thirds;
  else throw ConfigError("unknown constraint.volume_split '" + split_mode + "'");
  return how;
}

ConstraintSpec PipelineConfig::constraint_for(const TriSurface& base) const {
  ConstraintSpec spec = ConstraintSpec::preserving(constraint_kind_from_string(get("constraint.kind")), base);
  spec.volume_how = volume_how();
  return spec;
}

GmConfig PipelineConfig::gm() const {
  GmConfig c;
  for (const auto& [k, v] : values_)
    if (k.rfind("gm.", 0) == 0) c.set(k.substr(3), v);
  return c;
}

} // namespace cgm
