#include "cgm/generative/config.hpp"

#include <charconv>
#include <stdexcept>

#include "cgm/error.hpp"
#include "cgm/reduction/matrix_io.hpp"

namespace cgm {

std::string to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::ae:
    return "ae";
  case ModelKind::vae:
    return "vae";
  case ModelKind::aae:
    return "aae";
  case ModelKind::began:
    return "began";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "ae") return ModelKind::ae;
  if (name == "vae") return ModelKind::vae;
  if (name == "aae") return ModelKind::aae;
  if (name == "began") return ModelKind::began;
  throw ConfigError("unknown model kind '" + name + "' (expected ae, vae, aae or began)");
}

void GmConfig::validate(long cloud_dim, long samples) const {
  if (latent < 1 || pca_modes < 1 || hidden < 1 || depth < 1 || epochs < 1)
    throw ConfigError("model sizes and epochs must be positive");
  if (latent > pca_modes) throw ConfigError("latent dimension must not exceed the PCA mode count");
  if (pca_modes > cloud_dim || pca_modes > samples)
    throw ConfigError("PCA mode count exceeds the cloud dimension or the sample count");
  if (batch < 2) throw ConfigError("batch size must be at least 2");
  if (batch > samples) throw ConfigError("batch size exceeds the training set");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(k0 >= 0.0 && k0 <= 1.0)) throw ConfigError("k0 must lie in [0, 1]");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(lr > 0.0) || !(weight_decay >= 0.0)) throw ConfigError("bad optimizer settings");
  if (!(dropout >= 0.0 && dropout < 1.0) || !(disc_dropout >= 0.0 && disc_dropout < 1.0))
    throw ConfigError("dropout rates must lie in [0, 1)");
}

std::vector<std::pair<std::string, std::string>> GmConfig::to_pairs() const {
  return {{"kind", to_string(kind)},
          {"latent", std::to_string(latent)},
          {"pca_modes", std::to_string(pca_modes)},
          {"hidden", std::to_string(hidden)},
          {"depth", std::to_string(depth)},
          {"dropout", format_double(dropout)},
          {"disc_dropout", format_double(disc_dropout)},
          {"epochs", std::to_string(epochs)},
          {"batch", std::to_string(batch)},
          {"lr", format_double(lr)},
          {"weight_decay", format_double(weight_decay)},
          {"alpha", format_double(alpha)},
          {"gamma", format_double(gamma)},
          {"k_gain", format_double(k_gain)},
          {"k0", format_double(k0)},
          {"sigma", format_double(sigma)},
          {"seed", std::to_string(seed)}};
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size())
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

} // namespace

bool GmConfig::set(const std::string& key, const std::string& value) {
  if (key == "kind") kind = model_kind_from_string(value);
  else if (key == "latent") latent = parse_number<int>(key, value);
  else if (key == "pca_modes") pca_modes = parse_number<int>(key, value);
  else if (key == "hidden") hidden = parse_number<int>(key, value);
  else if (key == "depth") depth = parse_number<int>(key, value);
  else if (key == "dropout") dropout = parse_number<double>(key, value);
  else if (key == "disc_dropout") disc_dropout = parse_number<double>(key, value);
  else if (key == "epochs") epochs = parse_number<int>(key, value);
  else if (key == "batch") batch = parse_number<int>(key, value);
  else if (key == "lr") lr = parse_number<double>(key, value);
  else if (key == "weight_decay") weight_decay = parse_number<double>(key, value);
  else if (key == "alpha") alpha = parse_number<double>(key, value);
  else if (key == "gamma") gamma = parse_number<double>(key, value);
  else if (key == "k_gain") k_gain = parse_number<double>(key, value);
  else if (key == "k0") k0 = parse_number<double>(key, value);
  else if (key == "sigma") sigma = parse_number<double>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else return false;
  return true;
}

} // namespace cgm
