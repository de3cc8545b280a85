#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgm/constraints/cffd.hpp"
#include "cgm/geometry/surface.hpp"

namespace cgm {

enum class ConstraintKind { barycenter, volume };

std::string to_string(ConstraintKind kind);
ConstraintKind constraint_kind_from_string(const std::string& name);

/// Constraint identity shared by datasets, models and reports.
struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::barycenter;
  Vec3 barycenter = Vec3::Zero();
  double volume = 0.0;
  VolumeEnforcement volume_how;

  /// Targets taken from `surface` (its barycenter or enclosed volume).
  static ConstraintSpec preserving(ConstraintKind kind, const TriSurface& surface);

  /// Barycenter: max-abs coordinate deviation. Volume: relative deviation.
  double residual(const Points& vertices, const Faces& faces) const;
  /// Barycenter residual <= 1e-10 (1 + |c|); volume residual <= 1e-9.
  bool satisfied(const Points& vertices, const Faces& faces) const;

  std::string target_text() const;
  std::string achieved_text(const Points& vertices, const Faces& faces) const;
};

struct CffdSpec {
  FfdLattice lattice;
  ConstraintSpec constraint;
  CffdOptions options;
  double sigma = 0.05; // std-dev of free control-point displacements
};

struct CffdSample {
  TriSurface surface;
  DisplacementField free;
  DisplacementField correction;
  std::uint64_t seed = 0;
};

/// One deformation of `base`: free displacements ~ N(0, sigma^2) on unpinned
/// control points, corrected by cFFD.
CffdSample sample_cffd(const TriSurface& base, const CffdSpec& spec, std::uint64_t sample_seed);

/// n samples with per-sample seeds derived from (seed, "cffd", index).
std::vector<CffdSample> sample_cffd_dataset(const TriSurface& base, const CffdSpec& spec, int n, std::uint64_t seed,
                                            int threads = 1);

/// Writes sample_%05d.stl, manifest.tsv and meta.txt. `meta` lines are
/// appended verbatim to meta.txt after the standard entries.
void write_cffd_dataset(const std::filesystem::path& dir, const std::vector<CffdSample>& samples,
                        const CffdSpec& spec, const std::vector<std::string>& meta = {});

/// Every sample_*.stl in `dir`, in file-name order.
std::vector<TriSurface> read_surface_dataset(const std::filesystem::path& dir);
void write_surface_dataset(const std::filesystem::path& dir, const std::vector<TriSurface>& surfaces);

std::string sample_file_name(std::size_t index);

} // namespace cgm
