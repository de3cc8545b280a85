#include "cgm/generative/model.hpp"

#include <algorithm>
#include <cmath>

namespace cgm {

Matrix to_codes(const GenerativeModel& model, const Matrix& clouds) {
  return model.pca.project(clouds) * model.coef_scale.cwiseInverse().asDiagonal();
}

Matrix from_codes(const GenerativeModel& model, const Matrix& codes) {
  return model.pca.reconstruct(codes * model.coef_scale.asDiagonal());
}

Vector coefficient_scale(const PcaBasis& pca, Eigen::Index samples) {
  const Eigen::Index r = pca.rank();
  Vector s = pca.singular_values.head(r) / std::sqrt(std::max<double>(1.0, static_cast<double>(samples - 1)));
  const double top = s.size() ? s[0] : 0.0;
  for (Eigen::Index i = 0; i < r; ++i)
    if (!(s[i] > kRankTolerance * top)) s[i] = 1.0;
  return s;
}

void build_networks(GenerativeModel& model, int pca_modes) {
  const GmConfig& c = model.config;
  Rng init = Rng::derive(c.seed, "init");
  const int r = pca_modes, R = c.latent;

  if (c.kind == ModelKind::vae) {
    model.encoder = Mlp(mlp_stack(r, c.hidden, c.depth, 2 * R, Norm::batch_affine, c.dropout), init);
  } else {
    model.encoder = Mlp(mlp_stack(r, c.hidden, c.depth, R, Norm::batch_affine, c.dropout, Norm::batch_plain), init);
  }
  model.decoder = Mlp(mlp_stack(R, c.hidden, c.depth, r, Norm::batch_affine, c.dropout), init);

  model.discriminator = Mlp();
  model.disc_encoder = Mlp();
  model.disc_decoder = Mlp();
  if (c.kind == ModelKind::aae)
    model.discriminator = Mlp(
        mlp_stack(R, c.hidden, c.depth, 1, Norm::batch_plain, c.disc_dropout, Norm::none, Activation::sigmoid), init);
  if (c.kind == ModelKind::began) {
    model.disc_encoder =
        Mlp(mlp_stack(r, c.hidden, c.depth, R, Norm::batch_affine, c.dropout, Norm::batch_plain), init);
    model.disc_decoder = Mlp(mlp_stack(R, c.hidden, c.depth, r, Norm::batch_affine, c.dropout), init);
  }
  if (model.coef_scale.size() != r) model.coef_scale = Vector::Ones(r);
  model.latent_mean = Vector::Zero(R);
  model.latent_factor = Matrix::Identity(R, R);
}

Matrix constrained_forward(const GenerativeModel& model, const Matrix& latents) {
  if (latents.cols() != model.config.latent) throw DimensionError("constrained_forward: latent width mismatch");
  const Matrix clouds = from_codes(model, model.decoder.predict(latents));
  return model.enforcer().forward(clouds);
}

ConstrainedPass constrained_forward_train(GenerativeModel& model, const EnforcingLayer& layer, const Matrix& latents,
                                          Rng& rng) {
  if (latents.cols() != model.config.latent) throw DimensionError("constrained_forward: latent width mismatch");
  ConstrainedPass pass;
  MlpForward fw = model.decoder.forward(latents, rng);
  pass.decoder_cache = std::move(fw.cache);
  pass.unchecked = from_codes(model, fw.output);
  pass.clouds = layer.forward(pass.unchecked, &pass.enforce_cache);
  return pass;
}

MlpGradients constrained_backward(const GenerativeModel& model, const EnforcingLayer& layer,
                                  const ConstrainedPass& pass, const Matrix& cloud_grad) {
  const Matrix g = layer.backward(pass.enforce_cache, cloud_grad);
  return model.decoder.backward(pass.decoder_cache, (g * model.pca.modes) * model.coef_scale.asDiagonal());
}

Matrix encode(const GenerativeModel& model, const Matrix& clouds) {
  const Matrix out = model.encoder.predict(to_codes(model, clouds));
  return out.leftCols(model.config.latent);
}

SampleSet sample(const GenerativeModel& model, int n, std::uint64_t seed) {
  if (n < 0) throw ConfigError("sample: negative count");
  const int R = model.config.latent;
  SampleSet out;
  out.latents.resize(n, R);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::derive(seed, "sample", static_cast<std::uint64_t>(i));
    Vector eps(R);
    for (int j = 0; j < R; ++j) eps[j] = rng.normal();
    out.latents.row(i) = (model.latent_mean + model.latent_factor * eps).transpose();
  }
  if (n == 0) return out;
  const Matrix clouds = constrained_forward(model, out.latents);
  out.surfaces.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.surfaces.push_back({unflatten(clouds.row(i).transpose()), model.faces});
  return out;
}

Matrix dataset_matrix(const std::vector<TriSurface>& dataset) {
  if (dataset.empty()) throw DimensionError("dataset_matrix: empty dataset");
  const TriSurface& first = dataset.front();
  Matrix x(static_cast<Eigen::Index>(dataset.size()), 3 * first.vertex_count());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const TriSurface& s = dataset[i];
    if (s.vertex_count() != first.vertex_count() || s.faces.rows() != first.faces.rows() || s.faces != first.faces)
      throw DimensionError("dataset_matrix: samples do not share connectivity");
    x.row(static_cast<Eigen::Index>(i)) = flatten(s.vertices).transpose();
  }
  return x;
}

} // namespace cgm
