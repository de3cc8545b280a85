#include "cgm/generative/io.hpp"

#include <fstream>

#include "cgm/numerics/keyvalue.hpp"
#include "cgm/numerics/tensor_archive.hpp"
#include "cgm/reduction/matrix_io.hpp"

namespace cgm {

namespace {

constexpr const char* kArchive = "model.cgmt";
constexpr const char* kSidecar = "model.txt";

struct NamedNet {
  const char* name;
  Mlp GenerativeModel::*net;
};

constexpr NamedNet kNets[] = {{"encoder", &GenerativeModel::encoder},
                              {"decoder", &GenerativeModel::decoder},
                              {"discriminator", &GenerativeModel::discriminator},
                              {"disc_encoder", &GenerativeModel::disc_encoder},
                              {"disc_decoder", &GenerativeModel::disc_decoder}};

std::string layer_key(const char* net, std::size_t i, const char* field) {
  return std::string(net) + "." + std::to_string(i) + "." + field;
}

Matrix as_column(const Vector& v) { return Matrix(v); }

void put_net(TensorArchive& ar, const char* name, const Mlp& net) {
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const MlpLayer& l = net.layers()[i];
    ar.put(layer_key(name, i, "weight"), l.weight);
    ar.put(layer_key(name, i, "bias"), l.bias);
    if (l.has_norm()) {
      ar.put(layer_key(name, i, "bn_scale"), l.bn_scale);
      ar.put(layer_key(name, i, "bn_shift"), l.bn_shift);
      ar.put(layer_key(name, i, "running_mean"), as_column(l.running_mean));
      ar.put(layer_key(name, i, "running_var"), as_column(l.running_var));
    }
  }
}

void assign(Matrix& dst, const Matrix& src, const std::string& key) {
  if (dst.rows() != src.rows() || dst.cols() != src.cols())
    throw CacheMismatchError("checkpoint tensor " + key + " has an unexpected shape");
  dst = src;
}

void get_net(const TensorArchive& ar, const char* name, Mlp& net) {
  auto& layers = net.mutable_layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    MlpLayer& l = layers[i];
    assign(l.weight, ar.get(layer_key(name, i, "weight")), layer_key(name, i, "weight"));
    assign(l.bias, ar.get(layer_key(name, i, "bias")), layer_key(name, i, "bias"));
    if (l.has_norm()) {
      assign(l.bn_scale, ar.get(layer_key(name, i, "bn_scale")), layer_key(name, i, "bn_scale"));
      assign(l.bn_shift, ar.get(layer_key(name, i, "bn_shift")), layer_key(name, i, "bn_shift"));
      Matrix rm = as_column(l.running_mean), rv = as_column(l.running_var);
      assign(rm, ar.get(layer_key(name, i, "running_mean")), layer_key(name, i, "running_mean"));
      assign(rv, ar.get(layer_key(name, i, "running_var")), layer_key(name, i, "running_var"));
      l.running_mean = rm.col(0);
      l.running_var = rv.col(0);
    }
  }
  net.set_mode(Mode::eval);
}

std::string join(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

} // namespace

void save_model(const std::filesystem::path& dir, const GenerativeModel& model) {
  std::filesystem::create_directories(dir);
  TensorArchive ar;
  ar.put("pca.modes", model.pca.modes);
  ar.put("pca.mean", as_column(model.pca.mean));
  ar.put("pca.singular_values", as_column(model.pca.singular_values));
  ar.put("pca.coef_scale", as_column(model.coef_scale));
  ar.put("faces", model.faces.cast<double>());
  ar.put("sampler.mean", as_column(model.latent_mean));
  ar.put("sampler.factor", model.latent_factor);
  Matrix history(1, static_cast<Eigen::Index>(model.loss_history.size()));
  for (std::size_t i = 0; i < model.loss_history.size(); ++i) history(0, static_cast<Eigen::Index>(i)) = model.loss_history[i];
  ar.put("history.loss", history);
  for (const auto& n : kNets) put_net(ar, n.name, model.*n.net);
  ar.save(dir / kArchive);

  std::ofstream side(dir / kSidecar);
  if (!side) throw IoError("cannot write " + (dir / kSidecar).string());
  side << "format=cgm-model 1\n";
  for (const auto& [k, v] : model.config.to_pairs()) side << "gm." << k << "=" << v << "\n";
  const ConstraintSpec& c = model.constraint;
  side << "constraint.kind=" << to_string(c.kind) << "\n";
  side << "constraint.barycenter=" << join(c.barycenter) << "\n";
  side << "constraint.volume=" << format_double(c.volume) << "\n";
  side << "constraint.volume_order=" << c.volume_how.order[0] << "," << c.volume_how.order[1] << ","
       << c.volume_how.order[2] << "\n";
  side << "constraint.volume_split="
       << (c.volume_how.split == VolumeSplit::first_pass ? "first_pass" : "equal_thirds") << "\n";
  side << "began.k=" << format_double(model.k) << "\n";
  if (!side) throw IoError("write failed: " + (dir / kSidecar).string());
}

GenerativeModel load_model(const std::filesystem::path& dir) {
  const auto kv = parse_key_values(read_text_file((dir / kSidecar).string()));
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("model sidecar is missing '" + key + "'");
    return it->second;
  };
  if (need("format") != "cgm-model 1") throw ConfigError("unsupported model format");

  GenerativeModel model;
  for (const auto& [k, v] : kv)
    if (k.rfind("gm.", 0) == 0 && !model.config.set(k.substr(3), v)) throw ConfigError("unknown model key " + k);
  ConstraintSpec& c = model.constraint;
  c.kind = constraint_kind_from_string(need("constraint.kind"));
  const auto b = parse_doubles("constraint.barycenter", need("constraint.barycenter"));
  if (b.size() != 3) throw ConfigError("constraint.barycenter needs three values");
  c.barycenter = Vec3(b[0], b[1], b[2]);
  c.volume = parse_double("constraint.volume", need("constraint.volume"));
  const auto order = parse_doubles("constraint.volume_order", need("constraint.volume_order"));
  if (order.size() != 3) throw ConfigError("constraint.volume_order needs three values");
  for (int i = 0; i < 3; ++i) c.volume_how.order[static_cast<std::size_t>(i)] = static_cast<int>(order[static_cast<std::size_t>(i)]);
  const std::string& split_mode = need("constraint.volume_split");
  if (split_mode == "first_pass") c.volume_how.split = VolumeSplit::first_pass;
  else if (split_mode == "equal_thirds") c.volume_how.split = VolumeSplit::equal_thirds;
  else throw ConfigError("unknown volume split '" + split_mode + "'");
  model.k = parse_double("began.k", need("began.k"));

  const TensorArchive ar = TensorArchive::load(dir / kArchive);
  model.pca.modes = ar.get("pca.modes");
  model.pca.mean = ar.get("pca.mean").col(0);
  model.pca.singular_values = ar.get("pca.singular_values").col(0);
  if (model.pca.modes.cols() != model.config.pca_modes || model.pca.mean.size() != model.pca.modes.rows())
    throw CacheMismatchError("checkpoint PCA basis does not match its config");
  model.coef_scale = ar.get("pca.coef_scale").col(0);
  if (model.coef_scale.size() != model.pca.modes.cols())
    throw CacheMismatchError("checkpoint coefficient scale does not match the PCA basis");
  model.faces = ar.get("faces").cast<int>();
  build_networks(model, model.config.pca_modes);
  model.latent_mean = ar.get("sampler.mean").col(0);
  model.latent_factor = ar.get("sampler.factor");
  const Matrix& history = ar.get("history.loss");
  model.loss_history.assign(history.data(), history.data() + history.size());
  for (const auto& n : kNets) get_net(ar, n.name, model.*n.net);
  return model;
}

} // namespace cgm
