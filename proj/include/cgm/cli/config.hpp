#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cgm/constraints/dataset.hpp"
#include "cgm/generative/config.hpp"
#include "cgm/geometry/shapes.hpp"

namespace cgm {

/// Flat key=value pipeline configuration with dotted section prefixes.
///
/// Every key has a default; unknown keys are rejected. Sources are applied in
/// the order defaults, file, environment (CGM_<KEY> with '.' -> '_', upper
/// case), then explicit overrides such as command-line flags.
class PipelineConfig {
public:
  PipelineConfig();

  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text);
  /// `env` holds NAME=VALUE entries (as in environ); non-CGM_ entries are
  /// ignored, unknown CGM_ names raise ConfigError.
  void apply_env(const std::vector<std::string>& env);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  std::uint64_t get_seed() const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;
  /// Empty value -> empty path.
  std::filesystem::path get_path(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string resolved_text() const;
  void write_resolved(const std::filesystem::path& dir) const;

  static std::string env_name(const std::string& key);

  TriSurface base_shape() const;
  FfdLattice lattice() const;
  CffdOptions cffd_options(const FfdLattice& lattice) const;
  VolumeEnforcement volume_how() const;
  ConstraintSpec constraint_for(const TriSurface& base) const;
  GmConfig gm() const;

private:
  std::map<std::string, std::string> values_;
};

} // namespace cgm
