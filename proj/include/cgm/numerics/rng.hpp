#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

/// Deterministic random stream.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard;
/// the uniform and normal transforms are implemented here so draws do not
/// depend on the standard library's distribution classes.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for (root seed, purpose tag, index).
  static Rng derive(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);
  static std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, pairs cached).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace cgm
