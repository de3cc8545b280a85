#include "cgm/constraints/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cgm/geometry/stl.hpp"
#include "cgm/numerics/parallel.hpp"
#include "cgm/numerics/rng.hpp"

namespace cgm {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vec3& v) { return fmt17(v[0]) + "," + fmt17(v[1]) + "," + fmt17(v[2]); }

} // namespace

std::string to_string(ConstraintKind kind) { return kind == ConstraintKind::barycenter ? "barycenter" : "volume"; }

ConstraintKind constraint_kind_from_string(const std::string& name) {
  if (name == "barycenter") return ConstraintKind::barycenter;
  if (name == "volume") return ConstraintKind::volume;
  throw ConfigError("unknown constraint kind '" + name + "'");
}

ConstraintSpec ConstraintSpec::preserving(ConstraintKind kind, const TriSurface& surface) {
  ConstraintSpec s;
  s.kind = kind;
  s.barycenter = barycenter_of(surface.vertices);
  if (kind == ConstraintKind::volume) s.volume = volume_of(surface);
  return s;
}

double ConstraintSpec::residual(const Points& vertices, const Faces& faces) const {
  if (kind == ConstraintKind::barycenter) return (barycenter_of(vertices) - barycenter).cwiseAbs().maxCoeff();
  return std::abs(signed_volume(vertices, faces) - volume) / std::abs(volume);
}

bool ConstraintSpec::satisfied(const Points& vertices, const Faces& faces) const {
  const double r = residual(vertices, faces);
  if (kind == ConstraintKind::barycenter) return r <= 1e-10 * (1.0 + barycenter.norm());
  return r <= 1e-9;
}

std::string ConstraintSpec::target_text() const {
  return kind == ConstraintKind::barycenter ? fmt_vec(barycenter) : fmt17(volume);
}

std::string ConstraintSpec::achieved_text(const Points& vertices, const Faces& faces) const {
  return kind == ConstraintKind::barycenter ? fmt_vec(barycenter_of(vertices)) : fmt17(signed_volume(vertices, faces));
}

CffdSample sample_cffd(const TriSurface& base, const CffdSpec& spec, std::uint64_t sample_seed) {
  if (!(spec.sigma >= 0.0)) throw ConfigError("sample_cffd: sigma must be nonnegative");
  const FfdLattice& lattice = spec.lattice;
  const std::vector<bool> pinned = pinned_mask(lattice, spec.options.weights);

  CffdSample s;
  s.seed = sample_seed;
  Rng rng(sample_seed);
  s.free = DisplacementField::Zero(lattice.control_count(), 3);
  for (int c = 0; c < lattice.control_count(); ++c)
    for (int d = 0; d < 3; ++d) {
      const double draw = rng.normal();
      if (!pinned[static_cast<std::size_t>(c)]) s.free(c, d) = spec.sigma * draw;
    }

  if (spec.constraint.kind == ConstraintKind::barycenter) {
    CffdOptions options = spec.options;
    const Eigen::Index n = options.subset.empty() ? base.vertex_count() : static_cast<Eigen::Index>(options.subset.size());
    s.correction = cffd_correct(lattice, base.vertices, s.free, barycenter_constraint(n, spec.constraint.barycenter),
                                options);
  } else {
    s.correction = cffd_correct_volume(lattice, base, s.free, spec.constraint.volume, spec.options,
                                       spec.constraint.volume_how);
  }
  s.surface.faces = base.faces;
  s.surface.vertices = ffd_map(lattice, DisplacementField(s.free + s.correction), base.vertices).points;
  return s;
}

std::vector<CffdSample> sample_cffd_dataset(const TriSurface& base, const CffdSpec& spec, int n, std::uint64_t seed,
                                            int threads) {
  if (n < 1) throw ConfigError("sample_cffd_dataset: n must be >= 1");
  if (!(spec.sigma >= 0.0)) throw ConfigError("sample_cffd_dataset: sigma must be nonnegative");
  std::vector<CffdSample> out(static_cast<std::size_t>(n));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    out[i] = sample_cffd(base, spec, Rng::derive_seed(seed, "cffd", i));
  });
  return out;
}

std::string sample_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%05zu.stl", index);
  return buf;
}

void write_cffd_dataset(const std::filesystem::path& dir, const std::vector<CffdSample>& samples,
                        const CffdSpec& spec, const std::vector<std::string>& meta) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.tsv");
  if (!manifest) throw IoError("cannot write manifest in '" + dir.string() + "'");
  manifest << "index\tseed\tconstraint\ttarget\tachieved\tresidual\tdisplacement_norm\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const CffdSample& s = samples[i];
    write_stl(s.surface, dir / sample_file_name(i), "sample");
    manifest << i << '\t' << s.seed << '\t' << to_string(spec.constraint.kind) << '\t' << spec.constraint.target_text()
             << '\t' << spec.constraint.achieved_text(s.surface.vertices, s.surface.faces) << '\t'
             << fmt17(spec.constraint.residual(s.surface.vertices, s.surface.faces)) << '\t'
             << fmt17((s.free + s.correction).norm()) << '\n';
  }

  std::ofstream m(dir / "meta.txt");
  const auto& g = spec.lattice.grid();
  m << "lattice.grid=" << g[0] << "," << g[1] << "," << g[2] << "\n";
  const Mat3& a = spec.lattice.affine();
  m << "lattice.affine=";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m << fmt17(a(i, j)) << (i == 2 && j == 2 ? "\n" : ",");
  m << "lattice.offset=" << fmt_vec(spec.lattice.offset()) << "\n";
  m << "sigma=" << fmt17(spec.sigma) << "\n";
  m << "weld_tolerance=" << fmt17(kWeldTolerance) << "\n";
  m << "constraint.kind=" << to_string(spec.constraint.kind) << "\n";
  m << "constraint.target=" << spec.constraint.target_text() << "\n";
  m << "samples=" << samples.size() << "\n";
  for (const auto& line : meta) m << line << "\n";
}

std::vector<TriSurface> read_surface_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("dataset directory '" + dir.string() + "' does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("sample_", 0) == 0 && entry.path().extension() == ".stl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TriSurface> out;
  for (const auto& f : files) out.push_back(read_stl(f));
  return out;
}

void write_surface_dataset(const std::filesystem::path& dir, const std::vector<TriSurface>& surfaces) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < surfaces.size(); ++i) write_stl(surfaces[i], dir / sample_file_name(i), "sample");
}

} // namespace cgm
