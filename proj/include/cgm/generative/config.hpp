#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cgm {

enum class ModelKind { ae, vae, aae, began };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct GmConfig {
  ModelKind kind = ModelKind::ae;
  int latent = 8;      // R
  int pca_modes = 10;  // r
  int hidden = 64;
  int depth = 3;
  double dropout = 0.1;
  double disc_dropout = 0.95; // AAE latent discriminator
  int epochs = 500;
  int batch = 20;
  double lr = 1e-3;
  double weight_decay = 1e-2;
  double alpha = 1e-2; // VAE KL weight; AAE adversarial weight
  double gamma = 0.5;  // BEGAN diversity ratio
  double k_gain = 1e-3;
  double k0 = 0.0;
  double sigma = 1.0; // decoder observation scale (VAE)
  std::uint64_t seed = 0;

  /// Throws ConfigError unless R <= r <= min(point dims, samples), batch >= 2,
  /// alpha >= 0, gamma in (0, 1], k0 in [0, 1] and the sizes are positive.
  void validate(long cloud_dim, long samples) const;

  /// key=value pairs without prefix, in a fixed order.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
  /// Sets one field by key; returns false for an unknown key.
  bool set(const std::string& key, const std::string& value);
};

} // namespace cgm
