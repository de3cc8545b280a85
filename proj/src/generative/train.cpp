#include "cgm/generative/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgm/numerics/adamw.hpp"

namespace cgm {

double kl_normal(const Vector& mu, const Vector& s) {
  if (mu.size() != s.size()) throw DimensionError("kl_normal: mean and scale differ in length");
  if ((s.array() <= 0.0).any()) throw DimensionError("kl_normal: scales must be positive");
  return 0.5 * (mu.array().square() + s.array().square() - 1.0 - (s.array().square()).log()).sum();
}

double began_k_update(double k, double gain, double gamma, double lx, double lg) {
  return std::clamp(k + gain * (gamma * lx - lg), 0.0, 1.0);
}

namespace {

Matrix clamp_prob(const Matrix& p) { return p.cwiseMax(kDiscriminatorEps).cwiseMin(1.0 - kDiscriminatorEps); }

} // namespace

double aae_discriminator_loss(const Matrix& p_real, const Matrix& p_fake) {
  return -clamp_prob(p_real).array().log().mean() - (1.0 - clamp_prob(p_fake).array()).log().mean();
}

double aae_generator_loss(const Matrix& p_fake) { return -clamp_prob(p_fake).array().log().mean(); }

namespace {

struct Setup {
  GenerativeModel model;
  EnforcingLayer layer;
  Matrix x; // vectorized clouds
  Matrix y; // standardized PCA codes
};

Setup prepare(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, const GmConfig& config) {
  Setup s;
  s.x = dataset_matrix(dataset);
  config.validate(s.x.cols(), s.x.rows());
  s.model.config = config;
  PcaOptions opts;
  opts.modes = config.pca_modes;
  s.model.pca = pca_fit(s.x, opts);
  s.model.coef_scale = coefficient_scale(s.model.pca, s.x.rows());
  s.model.constraint = constraint;
  s.model.faces = dataset.front().faces;
  s.model.k = config.k0;
  build_networks(s.model, config.pca_modes);
  s.layer = s.model.enforcer();
  s.y = to_codes(s.model, s.x);
  return s;
}

/// Shuffled batches; a trailing batch smaller than 2 is dropped.
std::vector<std::vector<Eigen::Index>> epoch_batches(Eigen::Index n, int batch, std::uint64_t seed, int epoch) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = Rng::derive(seed, "shuffle", static_cast<std::uint64_t>(epoch));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  std::vector<std::vector<Eigen::Index>> out;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch));
    if (end - start >= 2) out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

Matrix gather(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

AdamW make_optimizer(const GmConfig& c) {
  AdamWConfig cfg;
  cfg.lr = c.lr;
  cfg.weight_decay = c.weight_decay;
  return AdamW(cfg);
}

void apply_step(Mlp& net, AdamW& opt, const MlpGradients& grads) {
  const std::vector<Matrix> g = grads.flat();
  const std::vector<Matrix*> p = net.parameters();
  opt.step(p, g);
}

void check_finite(double loss, int epoch) {
  if (!std::isfinite(loss))
    throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch), epoch);
}

/// Mean of per-row L2 norms of `diff` and its gradient.
double l2_loss(const Matrix& diff, Matrix& grad) {
  const double b = static_cast<double>(diff.rows());
  const Vector norms = diff.rowwise().norm();
  grad.resize(diff.rows(), diff.cols());
  for (Eigen::Index i = 0; i < diff.rows(); ++i)
    grad.row(i) = norms[i] > 0.0 ? Eigen::RowVectorXd(diff.row(i) / (norms[i] * b))
                                 : Eigen::RowVectorXd::Zero(diff.cols());
  return norms.mean();
}

void set_eval(GenerativeModel& m) {
  for (Mlp* net : {&m.encoder, &m.decoder, &m.discriminator, &m.disc_encoder, &m.disc_decoder}) net->set_mode(Mode::eval);
}

/// 1 where the probability is not clamped (the clamp passes no gradient).
Matrix inside_mask(const Matrix& p) {
  return ((p.array() > kDiscriminatorEps) && (p.array() < 1.0 - kDiscriminatorEps)).cast<double>().matrix();
}

double softplus(double v) { return v > 20.0 ? v : std::log1p(std::exp(v)); }
double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

} // namespace

GenerativeModel train_ae(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, GmConfig config) {
  config.kind = ModelKind::ae;
  Setup s = prepare(dataset, constraint, config);
  GenerativeModel& m = s.model;
  AdamW enc_opt = make_optimizer(config), dec_opt = make_optimizer(config);
  Rng rng = Rng::derive(config.seed, "train");

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0.0;
    const auto batches = epoch_batches(s.x.rows(), config.batch, config.seed, epoch);
    for (const auto& rows : batches) {
      const Matrix xb = gather(s.x, rows), yb = gather(s.y, rows);
      MlpForward fe = m.encoder.forward(yb, rng);
      const ConstrainedPass pass = constrained_forward_train(m, s.layer, fe.output, rng);
      Matrix gx;
      total += l2_loss(pass.clouds - xb, gx);
      const MlpGradients gd = constrained_backward(m, s.layer, pass, gx);
      const MlpGradients ge = m.encoder.backward(fe.cache, gd.input);
      apply_step(m.decoder, dec_opt, gd);
      apply_step(m.encoder, enc_opt, ge);
    }
    const double loss = total / static_cast<double>(batches.size());
    check_finite(loss, epoch + 1);
    m.loss_history.push_back(loss);
  }
  set_eval(m);

  // Full-covariance normal fit of the encoded training set.
  const Matrix z = encode(m, s.x);
  m.latent_mean = z.colwise().mean().transpose();
  const Matrix centered = z.rowwise() - m.latent_mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(z.rows() - 1);
  const SymmetricEigen<double> eig = eigh_symmetric(cov);
  m.latent_factor = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return m;
}

GenerativeModel train_vae(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, GmConfig config) {
  config.kind = ModelKind::vae;
  Setup s = prepare(dataset, constraint, config);
  GenerativeModel& m = s.model;
  const int R = config.latent;
  const double inv_var = 1.0 / (config.sigma * config.sigma);
  AdamW enc_opt = make_optimizer(config), dec_opt = make_optimizer(config);
  Rng rng = Rng::derive(config.seed, "train");

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0.0;
    const auto batches = epoch_batches(s.x.rows(), config.batch, config.seed, epoch);
    for (const auto& rows : batches) {
      const Matrix xb = gather(s.x, rows), yb = gather(s.y, rows);
      const double b = static_cast<double>(rows.size());
      MlpForward fe = m.encoder.forward(yb, rng);
      const Matrix mu = fe.output.leftCols(R);
      const Matrix raw = fe.output.rightCols(R);
      const Matrix scale = raw.unaryExpr([](double v) { return softplus(v) + 1e-8; });
      const Matrix eps = rng.normal_matrix(xb.rows(), R);
      const Matrix z = mu + scale.cwiseProduct(eps);

      const ConstrainedPass pass = constrained_forward_train(m, s.layer, z, rng);
      const Matrix diff = pass.clouds - xb;
      double loss = 0.5 * inv_var * diff.rowwise().squaredNorm().mean();
      for (Eigen::Index i = 0; i < mu.rows(); ++i)
        loss += config.alpha * kl_normal(mu.row(i).transpose(), scale.row(i).transpose()) / b;
      total += loss;

      const MlpGradients gd = constrained_backward(m, s.layer, pass, diff * (inv_var / b));
      const Matrix& gz = gd.input;
      Matrix gout(xb.rows(), 2 * R);
      gout.leftCols(R) = gz + (config.alpha / b) * mu;
      const Matrix gscale =
          gz.cwiseProduct(eps) + (config.alpha / b) * (scale - scale.cwiseInverse());
      gout.rightCols(R) = gscale.cwiseProduct(raw.unaryExpr([](double v) { return logistic(v); }));
      const MlpGradients ge = m.encoder.backward(fe.cache, gout);
      apply_step(m.decoder, dec_opt, gd);
      apply_step(m.encoder, enc_opt, ge);
    }
    const double loss = total / static_cast<double>(batches.size());
    check_finite(loss, epoch + 1);
    m.loss_history.push_back(loss);
  }
  set_eval(m);
  return m;
}

GenerativeModel train_aae(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint, GmConfig config) {
  config.kind = ModelKind::aae;
  Setup s = prepare(dataset, constraint, config);
  GenerativeModel& m = s.model;
  const int R = config.latent;
  AdamW enc_opt = make_optimizer(config), dec_opt = make_optimizer(config), disc_opt = make_optimizer(config);
  Rng rng = Rng::derive(config.seed, "train");

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0.0;
    const auto batches = epoch_batches(s.x.rows(), config.batch, config.seed, epoch);
    for (const auto& rows : batches) {
      const Matrix xb = gather(s.x, rows), yb = gather(s.y, rows);
      const double b = static_cast<double>(rows.size());

      // Discriminator: real codes from the prior, fake codes from the encoder.
      {
        const Matrix fake = m.encoder.forward(yb, rng).output;
        const Matrix real = rng.normal_matrix(xb.rows(), R);
        MlpForward fr = m.discriminator.forward(real, rng);
        MlpForward ff = m.discriminator.forward(fake, rng);
        const Matrix pr = clamp_prob(fr.output), pf = clamp_prob(ff.output);
        const Matrix gr = -(inside_mask(fr.output).array() / pr.array()).matrix() / b;
        const Matrix gf = (inside_mask(ff.output).array() / (1.0 - pf.array())).matrix() / b;
        MlpGradients gd = m.discriminator.backward(fr.cache, gr);
        gd += m.discriminator.backward(ff.cache, gf);
        apply_step(m.discriminator, disc_opt, gd);
      }

      // Encoder/decoder: reconstruction plus fooling the discriminator.
      MlpForward fe = m.encoder.forward(yb, rng);
      const ConstrainedPass pass = constrained_forward_train(m, s.layer, fe.output, rng);
      Matrix gx;
      double loss = l2_loss(pass.clouds - xb, gx);
      MlpForward fa = m.discriminator.forward(fe.output, rng);
      const Matrix pa = clamp_prob(fa.output);
      loss += config.alpha * aae_generator_loss(fa.output);
      total += loss;
      const Matrix ga = -config.alpha * (inside_mask(fa.output).array() / pa.array()).matrix() / b;
      const Matrix gz_adv = m.discriminator.backward(fa.cache, ga).input;

      const MlpGradients gd = constrained_backward(m, s.layer, pass, gx);
      const MlpGradients ge = m.encoder.backward(fe.cache, gd.input + gz_adv);
      apply_step(m.decoder, dec_opt, gd);
      apply_step(m.encoder, enc_opt, ge);
    }
    const double loss = total / static_cast<double>(batches.size());
    check_finite(loss, epoch + 1);
    m.loss_history.push_back(loss);
  }
  set_eval(m);
  return m;
}

namespace {

/// Autoencoding discriminator f(x) = |x - D(x)| on vectorized clouds.
struct BeganEval {
  Vector f;
  Matrix residual;
  MlpForward enc, dec;
};

BeganEval began_forward(GenerativeModel& m, const Matrix& clouds, Rng& rng) {
  BeganEval e;
  e.enc = m.disc_encoder.forward(to_codes(m, clouds), rng);
  e.dec = m.disc_decoder.forward(e.enc.output, rng);
  e.residual = clouds - from_codes(m, e.dec.output);
  e.f = e.residual.rowwise().norm();
  return e;
}

struct BeganGrads {
  MlpGradients enc, dec;
  Matrix input; // d/d(clouds)
};

/// Gradients of sum_i w_i f(x_i).
BeganGrads began_backward(const GenerativeModel& m, const BeganEval& e, const Vector& w) {
  Matrix direct(e.residual.rows(), e.residual.cols());
  for (Eigen::Index i = 0; i < direct.rows(); ++i)
    direct.row(i) = e.f[i] > 0.0 ? Eigen::RowVectorXd(e.residual.row(i) * (w[i] / e.f[i]))
                                 : Eigen::RowVectorXd::Zero(direct.cols());
  BeganGrads g;
  const Matrix scaled_modes = m.pca.modes * m.coef_scale.asDiagonal();
  g.dec = m.disc_decoder.backward(e.dec.cache, -direct * scaled_modes);
  g.enc = m.disc_encoder.backward(e.enc.cache, g.dec.input);
  g.input = direct + g.enc.input * m.coef_scale.cwiseInverse().asDiagonal() * m.pca.modes.transpose();
  return g;
}

} // namespace

GenerativeModel train_began(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint,
                            GmConfig config) {
  config.kind = ModelKind::began;
  Setup s = prepare(dataset, constraint, config);
  GenerativeModel& m = s.model;
  const int R = config.latent;
  AdamW gen_opt = make_optimizer(config), denc_opt = make_optimizer(config), ddec_opt = make_optimizer(config);
  Rng rng = Rng::derive(config.seed, "train");
  double k = config.k0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0.0;
    const auto batches = epoch_batches(s.x.rows(), config.batch, config.seed, epoch);
    for (const auto& rows : batches) {
      const Matrix xb = gather(s.x, rows), yb = gather(s.y, rows);
      const Eigen::Index nb = xb.rows();
      const double b = static_cast<double>(nb);

      // Step 1: discriminator on real data and on detached G(Enc(x)).
      const Matrix codes = m.disc_encoder.forward(yb, rng).output;
      const Matrix fake = constrained_forward_train(m, s.layer, codes, rng).clouds;
      const BeganEval er = began_forward(m, xb, rng);
      const BeganEval ef = began_forward(m, fake, rng);
      const double lx = er.f.mean();
      BeganGrads gr = began_backward(m, er, Vector::Constant(nb, 1.0 / b));
      const BeganGrads gf = began_backward(m, ef, Vector::Constant(nb, -k / b));
      gr.enc += gf.enc;
      gr.dec += gf.dec;
      apply_step(m.disc_encoder, denc_opt, gr.enc);
      apply_step(m.disc_decoder, ddec_opt, gr.dec);

      // Step 2: generator minimizes f on its own samples.
      const Matrix z = rng.normal_matrix(nb, R);
      const ConstrainedPass pass = constrained_forward_train(m, s.layer, z, rng);
      const BeganEval eg = began_forward(m, pass.clouds, rng);
      const double lg = eg.f.mean();
      const BeganGrads gg = began_backward(m, eg, Vector::Constant(nb, 1.0 / b));
      const MlpGradients gd = constrained_backward(m, s.layer, pass, gg.input);
      apply_step(m.decoder, gen_opt, gd);

      // Step 3: equilibrium control.
      k = began_k_update(k, config.k_gain, config.gamma, lx, lg);
      total += lx + std::abs(config.gamma * lx - lg);
    }
    const double loss = total / static_cast<double>(batches.size());
    check_finite(loss, epoch + 1);
    m.loss_history.push_back(loss);
  }
  m.k = k;
  set_eval(m);
  return m;
}

GenerativeModel train_model(const std::vector<TriSurface>& dataset, const ConstraintSpec& constraint,
                            const GmConfig& config) {
  switch (config.kind) {
  case ModelKind::ae:
    return train_ae(dataset, constraint, config);
  case ModelKind::vae:
    return train_vae(dataset, constraint, config);
  case ModelKind::aae:
    return train_aae(dataset, constraint, config);
  case ModelKind::began:
    return train_began(dataset, constraint, config);
  }
  throw ConfigError("unknown model kind");
}

} // namespace cgm
