#pragma once

#include <cstdint>
#include <vector>

#include "cgm/constraints/dataset.hpp"
#include "cgm/generative/config.hpp"
#include "cgm/generative/enforcing.hpp"
#include "cgm/numerics/mlp.hpp"
#include "cgm/reduction/pca.hpp"

namespace cgm {

/// PCA-compressed generative model with a constraint-enforcing output layer.
///
/// `decoder` maps latents to PCA coefficients for every kind (it is the
/// generator for BEGAN). `encoder` maps PCA coefficients to latents (to mean
/// and raw scale for the VAE, 2R outputs). AAE adds `discriminator` on
/// latents; BEGAN adds the autoencoding discriminator `disc_encoder` /
/// `disc_decoder`, also in PCA space.
struct GenerativeModel {
  GmConfig config;
  PcaBasis pca;
  ConstraintSpec constraint;
  Faces faces;
  Mlp encoder, decoder, discriminator, disc_encoder, disc_decoder;
  Vector coef_scale;    // per-mode std of the training PCA coefficients
  Vector latent_mean;   // sampler location (AE); zero otherwise
  Matrix latent_factor; // sampler factor L with covariance L L^T (AE); identity otherwise
  double k = 0.0;       // BEGAN equilibrium variable after training
  std::vector<double> loss_history;

  ModelKind kind() const { return config.kind; }
  Eigen::Index point_count() const { return pca.dim() / 3; }
  EnforcingLayer enforcer() const { return EnforcingLayer(constraint, faces, point_count()); }
};

/// Standardized PCA codes (X - mean) U / coef_scale, one row per cloud.
Matrix to_codes(const GenerativeModel& model, const Matrix& clouds);
/// Clouds (Y * coef_scale) U^T + mean from standardized codes.
Matrix from_codes(const GenerativeModel& model, const Matrix& codes);
/// Per-mode standard deviation of training coefficients; modes without
/// spread get scale 1.
Vector coefficient_scale(const PcaBasis& pca, Eigen::Index samples);

/// Allocates networks for `config` with fresh initial weights.
void build_networks(GenerativeModel& model, int pca_modes);

/// Eval-mode decode -> unstandardize -> PCA reconstruct -> enforce, one row per latent.
Matrix constrained_forward(const GenerativeModel& model, const Matrix& latents);

/// Training-time forward through the decoder in its current mode.
struct ConstrainedPass {
  Matrix clouds;    // enforced, B x M
  Matrix unchecked; // before enforcement
  MlpCache decoder_cache;
  EnforceCache enforce_cache;
};

ConstrainedPass constrained_forward_train(GenerativeModel& model, const EnforcingLayer& layer, const Matrix& latents,
                                          Rng& rng);
/// Decoder gradients (and latent gradient in `.input`) for dL/d(clouds).
MlpGradients constrained_backward(const GenerativeModel& model, const EnforcingLayer& layer,
                                  const ConstrainedPass& pass, const Matrix& cloud_grad);

/// Eval-mode latent codes of vectorized clouds (VAE: the posterior mean).
Matrix encode(const GenerativeModel& model, const Matrix& clouds);

struct SampleSet {
  std::vector<TriSurface> surfaces;
  Matrix latents; // n x R
};

/// Latent i is drawn from Rng::derive(seed, "sample", i).
SampleSet sample(const GenerativeModel& model, int n, std::uint64_t seed);

/// Row-wise vectorized vertices of surfaces sharing one connectivity.
Matrix dataset_matrix(const std::vector<TriSurface>& dataset);

} // namespace cgm
