#pragma once

#include <vector>

#include "cgm/generative/model.hpp"

namespace cgm {

/// 0.5 sum(mu^2 + s^2 - 1 - ln s^2): KL(N(mu, diag s^2) || N(0, I)).
double kl_normal(const Vector& mu, const Vector& s);

/// clamp(k + gain (gamma lx - lg), 0, 1).
double began_k_update(double k, double gain, double gamma, double lx, double lg);

inline constexpr double kDiscriminatorEps = 1e-7;

/// -mean log D(real) - mean log(1 - D(fake)), probabilities clamped to
/// (eps, 1 - eps).
double aae_discriminator_loss(const Matrix& p_real, const Matrix& p_fake);
/// -mean log D(fake): the encoder's adversarial term.
double aae_generator_loss(const Matrix& p_fake);

GenerativeModel train_ae(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, GmConfig config);
GenerativeModel train_vae(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, GmConfig config);
GenerativeModel train_aae(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, GmConfig config);
GenerativeModel train_began(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint,
                            GmConfig config);

/// Dispatches on config.kind.
GenerativeModel train_model(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint,
                            const GmConfig& config);

} // namespace cgm
